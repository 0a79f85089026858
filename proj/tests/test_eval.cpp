#include "support.hpp"

#include "adbl2/error.hpp"
#include "adbl2/eval.hpp"

#include <doctest.h>

using namespace adbl2;
using namespace adbl2::eval;
using dataset::Triple;
using dataset::TripleDataset;

namespace {

constexpr auto A = RelationType::Attack;
constexpr auto S = RelationType::Support;

TripleDataset labelled(const std::vector<std::pair<std::string, RelationType>>& rows) {
    TripleDataset ds;
    int n = 0;
    for (const auto& [domain, label] : rows) {
        ds.triples.push_back(Triple{"c" + std::to_string(n), "p" + std::to_string(n), label, domain, 1, "d"});
        ++n;
    }
    return ds;
}

TripleDataset balanced(const std::string& domain, std::size_t attack, std::size_t support) {
    std::vector<std::pair<std::string, RelationType>> rows;
    for (std::size_t i = 0; i < attack; ++i) rows.emplace_back(domain, A);
    for (std::size_t i = 0; i < support; ++i) rows.emplace_back(domain, S);
    return labelled(rows);
}

BackendConfig with(std::shared_ptr<const ScoringBackend> b, std::string id) {
    BackendConfig cfg;
    cfg.backend_id = std::move(id);
    cfg.backend = std::move(b);
    return cfg;
}

}  // namespace

TEST_CASE("confusion counts for a small example") {
    std::vector<RelationType> gold{A, A, S, S}, pred{A, S, S, A};
    auto c = accumulate(gold, pred);
    CHECK(c.tp_attack == 1);
    CHECK(c.fp_attack == 1);
    CHECK(c.fn_attack == 1);
    CHECK(c.tp_support == 1);
    CHECK(c.fp_support == 1);
    CHECK(c.fn_support == 1);
    CHECK(f1(c.tp_attack, c.fp_attack, c.fn_attack) == doctest::Approx(0.5));

    std::vector<RelationType> shorter{A};
    CHECK_THROWS_AS(accumulate(gold, shorter), Error);
    try {
        accumulate({}, {});
        FAIL("expected LengthMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LengthMismatch);
    }
}

TEST_CASE("confusion counts: duality and label mirror") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 200; ++round) {
        std::size_t n = 1 + rng() % 40;
        std::vector<RelationType> gold(n), pred(n), gold_m(n), pred_m(n);
        for (std::size_t i = 0; i < n; ++i) {
            gold[i] = rng() & 1 ? A : S;
            pred[i] = rng() & 1 ? A : S;
            gold_m[i] = opposite(gold[i]);
            pred_m[i] = opposite(pred[i]);
        }
        auto c = accumulate(gold, pred);
        CHECK(c.fp_attack == c.fn_support);
        CHECK(c.fn_attack == c.fp_support);
        CHECK(c.tp_attack + c.tp_support + c.fp_attack + c.fn_attack == n);
        auto m = accumulate(gold_m, pred_m);
        CHECK(m.tp_attack == c.tp_support);
        CHECK(m.fp_attack == c.fp_support);
        CHECK(m.fn_attack == c.fn_support);
    }
}

TEST_CASE("f1 values") {
    CHECK(std::abs(f1(2, 1, 1) - 0.6667) <= 1e-4);
    CHECK(f1(0, 0, 0) == 0.0);
    CHECK(f1(0, 3, 0) == 0.0);
    CHECK(f1(5, 0, 0) == 1.0);
    for (std::size_t tp = 0; tp <= 20; ++tp) {
        for (std::size_t fp = 0; fp <= 20; ++fp) {
            for (std::size_t fn = 0; fn <= 20; ++fn) {
                if (tp == 0) {
                    CHECK(f1(tp, fp, fn) == 0.0);
                    continue;
                }
                auto expect = test::f1_oracle(static_cast<double>(tp), static_cast<double>(fp), static_cast<double>(fn));
                CHECK(std::abs(f1(tp, fp, fn) - expect) <= 1e-12);
            }
        }
    }
    CHECK(std::abs(macro_f1(0.895, 0.921) - 0.908) <= 5e-4);
}

TEST_CASE("constant attack predictor on a balanced domain") {
    auto ds = balanced("Art", 50, 50);
    auto report = evaluate(with(std::make_shared<ConstantBackend>(0.0, -5.0), "const"), ds);
    REQUIRE(report.rows.size() == 1);
    const auto& r = report.rows[0];
    CHECK(std::abs(r.f1_attack - 0.6667) <= 1e-4);
    CHECK(r.f1_support == 0.0);
    CHECK(std::abs(r.f1_macro - 0.3333) <= 1e-4);
    CHECK_FALSE(r.zero_division);  // support F1 is 0 / 50, not 0 / 0
    CHECK(r.n_attack == 50);
    CHECK(r.n_support == 50);
    CHECK(report.backend_id == "const");
}

TEST_CASE("label oracle scores 1.0 everywhere") {
    auto ds = balanced("Art", 7, 9);
    auto more = balanced("Life", 4, 3);
    for (auto& t : more.triples) {
        t.child_text += "-life";
        ds.triples.push_back(t);
    }
    auto oracle = std::make_shared<LabelOracleBackend>();
    for (const auto& t : ds.triples) oracle->add(t.parent_text, t.child_text, t.label);
    auto report = evaluate(with(oracle, "oracle"), ds);
    REQUIRE(report.rows.size() == 2);
    for (const auto& r : report.rows) {
        CHECK(r.f1_attack == 1.0);
        CHECK(r.f1_support == 1.0);
        CHECK(r.f1_macro == 1.0);
    }
    CHECK(report.overall_average_macro == 1.0);
}

TEST_CASE("report rows ignore input order; averages are unweighted by default") {
    std::mt19937_64 rng(12);
    std::vector<std::pair<std::string, RelationType>> rows;
    for (int i = 0; i < 60; ++i) rows.emplace_back(i % 3 == 0 ? "Small" : "Big", rng() & 1 ? A : S);
    rows.emplace_back("Small", A);
    rows.emplace_back("Small", S);
    auto ds = labelled(rows);
    std::vector<std::optional<RelationType>> preds;
    for (std::size_t i = 0; i < ds.triples.size(); ++i) preds.emplace_back(rng() & 1 ? A : S);
    auto report = build_report(ds, preds, "x");

    std::vector<std::size_t> order(ds.triples.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    TripleDataset shuffled;
    std::vector<std::optional<RelationType>> shuffled_preds;
    for (auto i : order) {
        shuffled.triples.push_back(ds.triples[i]);
        shuffled_preds.push_back(preds[i]);
    }
    auto again = build_report(shuffled, shuffled_preds, "x");
    REQUIRE(again.rows.size() == report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(again.rows[i].domain == report.rows[i].domain);
        CHECK(again.rows[i].counts == report.rows[i].counts);
        CHECK(again.rows[i].f1_macro == report.rows[i].f1_macro);
    }
    CHECK(report.rows[0].domain == "Big");
    double mean = (report.rows[0].f1_macro + report.rows[1].f1_macro) / 2.0;
    CHECK(std::abs(report.overall_average_macro - mean) <= 1e-12);
    double n0 = static_cast<double>(report.rows[0].n_attack + report.rows[0].n_support);
    double n1 = static_cast<double>(report.rows[1].n_attack + report.rows[1].n_support);
    double weighted = (report.rows[0].f1_macro * n0 + report.rows[1].f1_macro * n1) / (n0 + n1);
    CHECK(std::abs(report.weighted_average_macro - weighted) <= 1e-12);
}

TEST_CASE("failed classifications mark a row incomplete") {
    auto ds = balanced("Art", 2, 2);
    std::vector<std::optional<RelationType>> preds{A, std::nullopt, S, S};
    auto report = build_report(ds, preds, "x");
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].failed == 1);
    CHECK(report.rows[0].incomplete);
    CHECK(report.rows[0].n_attack == 2);
    CHECK(render_report(report, ReportFormat::Table).find("incomplete") != std::string::npos);
    std::vector<std::optional<RelationType>> short_preds{A};
    CHECK_THROWS_AS(build_report(ds, short_preds, "x"), Error);
}

TEST_CASE("rounding is half to even") {
    CHECK(round_half_even(0.5, 0) == 0.0);
    CHECK(round_half_even(1.5, 0) == 2.0);
    CHECK(round_half_even(2.5, 0) == 2.0);
    CHECK(round_half_even(-2.5, 0) == -2.0);
    CHECK(round_half_even(12.25, 1) == doctest::Approx(12.2));
    CHECK(round_half_even(12.75, 1) == doctest::Approx(12.8));
}

TEST_CASE("rendered formats") {
    auto ds = labelled({{"Law, Politics, Sports", A}, {"Law, Politics, Sports", S}, {"Art", A}, {"Art", S}});
    std::vector<std::optional<RelationType>> preds{A, S, A, A};
    auto report = build_report(ds, preds, "stub");

    auto table = render_report(report, ReportFormat::Table);
    CHECK(table.rfind("Backend: stub\n", 0) == 0);
    CHECK(table.find("Attack/Support/Macro F1-score") != std::string::npos);
    CHECK(table.find("100.0 / 100.0 / 100.0") != std::string::npos);
    CHECK(table.find("66.7 / 0.0 / 33.3") != std::string::npos);
    CHECK(table.find("Average macro F1-score (unweighted): 66.67%") != std::string::npos);
    CHECK(table.find("Art") < table.find("Law, Politics"));

    auto csv = render_report(report, ReportFormat::Csv);
    CHECK(csv.rfind("domain,n_attack,n_support,f1_attack,f1_support,f1_macro\n", 0) == 0);
    CHECK(csv.find("Art,1,1,0.666667,0.000000,0.333333\n") != std::string::npos);
    CHECK(csv.find("\"Law, Politics, Sports\",1,1,1.000000,1.000000,1.000000\n") != std::string::npos);

    auto j = nlohmann::json::parse(render_report(report, ReportFormat::Json));
    CHECK(j.at("rows").size() == 2);
    CHECK(j.at("backend_id") == "stub");

    report.show_weighted = true;
    CHECK(render_report(report, ReportFormat::Table).find("(weighted)") != std::string::npos);

    CHECK(parse_format("csv") == ReportFormat::Csv);
    CHECK_FALSE(parse_format("xml").has_value());
}
