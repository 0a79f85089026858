#include "adbl2/eval.hpp"
#include "adbl2/error.hpp"
#include "adbl2/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <map>

namespace adbl2::eval {

using nlohmann::json;

ConfusionCounts accumulate(std::span<const RelationType> golds, std::span<const RelationType> preds) {
    if (golds.size() != preds.size() || golds.empty()) {
        throw Error(ErrorCode::LengthMismatch,
                    fmt::format("need equal non-empty label lists, got {} golds and {} predictions", golds.size(),
                                preds.size()));
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < golds.size(); ++i) {
        auto g = golds[i];
        auto p = preds[i];
        if (g == p) {
            (g == RelationType::Attack ? c.tp_attack : c.tp_support) += 1;
        } else if (p == RelationType::Attack) {
            ++c.fp_attack;
            ++c.fn_support;
        } else {
            ++c.fp_support;
            ++c.fn_attack;
        }
    }
    return c;
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) noexcept {
    auto denom = 2 * tp + fp + fn;
    if (denom == 0) return 0.0;
    return static_cast<double>(2 * tp) / static_cast<double>(denom);
}

double macro_f1(double f1_attack, double f1_support) noexcept { return (f1_attack + f1_support) / 2.0; }

EvalReport build_report(const dataset::TripleDataset& data, std::span<const std::optional<RelationType>> predictions,
                        std::string backend_id) {
    if (predictions.size() != data.triples.size()) {
        throw Error(ErrorCode::LengthMismatch, "one prediction slot per triple is required");
    }

    std::map<std::string, ReportRow> rows;
    for (std::size_t i = 0; i < data.triples.size(); ++i) {
        const auto& t = data.triples[i];
        auto& row = rows[t.domain];
        row.domain = t.domain;
        (t.label == RelationType::Attack ? row.n_attack : row.n_support) += 1;

        if (!predictions[i]) {
            ++row.failed;
            continue;
        }
        auto& c = row.counts;
        auto p = *predictions[i];
        if (p == t.label) {
            (p == RelationType::Attack ? c.tp_attack : c.tp_support) += 1;
        } else if (p == RelationType::Attack) {
            ++c.fp_attack;
            ++c.fn_support;
        } else {
            ++c.fp_support;
            ++c.fn_attack;
        }
    }

    EvalReport report;
    report.backend_id = std::move(backend_id);
    report.dataset_ref = dataset::manifest(data);
    double sum = 0.0;
    double weighted = 0.0;
    std::size_t total = 0;
    for (auto& [domain, row] : rows) {
        const auto& c = row.counts;
        row.f1_attack = f1(c.tp_attack, c.fp_attack, c.fn_attack);
        row.f1_support = f1(c.tp_support, c.fp_support, c.fn_support);
        row.f1_macro = macro_f1(row.f1_attack, row.f1_support);
        row.incomplete = row.failed > 0;
        row.zero_division = (2 * c.tp_attack + c.fp_attack + c.fn_attack) == 0 ||
                            (2 * c.tp_support + c.fp_support + c.fn_support) == 0;
        sum += row.f1_macro;
        auto n = row.n_attack + row.n_support;
        weighted += row.f1_macro * static_cast<double>(n);
        total += n;
        report.rows.push_back(row);
    }
    if (!report.rows.empty()) {
        report.overall_average_macro = sum / static_cast<double>(report.rows.size());
        report.weighted_average_macro = weighted / static_cast<double>(total);
    }
    return report;
}

EvalReport evaluate(const BackendConfig& config, const dataset::TripleDataset& data) {
    if (data.triples.empty()) throw Error(ErrorCode::InvalidArgument, "cannot evaluate an empty dataset");
    validate(config);

    std::vector<std::optional<RelationType>> predictions(data.triples.size());
    parallel_for_index(data.triples.size(), config.max_in_flight, [&](std::size_t i) {
        const auto& t = data.triples[i];
        try {
            predictions[i] = classify(config, t.parent_text, t.child_text).predicted;
        } catch (const std::exception&) {
            predictions[i].reset();
        }
    });
    return build_report(data, predictions, config.backend_id);
}

std::optional<ReportFormat> parse_format(std::string_view name) noexcept {
    if (name == "table") return ReportFormat::Table;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    return std::nullopt;
}

double round_half_even(double value, int decimals) noexcept {
    auto scale = std::pow(10.0, decimals);
    auto saved = std::fegetround();
    std::fesetround(FE_TONEAREST);
    auto r = std::nearbyint(value * scale) / scale;
    std::fesetround(saved);
    return r;
}

json to_json(const EvalReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        const auto& c = r.counts;
        rows.push_back({{"domain", r.domain},
                        {"n_attack", r.n_attack},
                        {"n_support", r.n_support},
                        {"f1_attack", r.f1_attack},
                        {"f1_support", r.f1_support},
                        {"f1_macro", r.f1_macro},
                        {"failed", r.failed},
                        {"incomplete", r.incomplete},
                        {"zero_division", r.zero_division},
                        {"confusion",
                         {{"tp_attack", c.tp_attack},
                          {"fp_attack", c.fp_attack},
                          {"fn_attack", c.fn_attack},
                          {"tp_support", c.tp_support},
                          {"fp_support", c.fp_support},
                          {"fn_support", c.fn_support}}}});
    }
    return {{"backend_id", report.backend_id},
            {"rows", rows},
            {"overall_average_macro", report.overall_average_macro},
            {"weighted_average_macro", report.weighted_average_macro},
            {"dataset", report.dataset_ref}};
}

namespace {

std::string percent(double v) { return fmt::format("{:.1f}", round_half_even(v * 100.0, 1)); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string render_table(const EvalReport& report) {
    std::size_t width = 6;
    for (const auto& r : report.rows) width = std::max(width, r.domain.size());

    std::string out = fmt::format("Backend: {}\n", report.backend_id);
    out += fmt::format("{:<{}}  {:>7}  {:>7}  {}\n", "Domain", width, "Attack", "Support", "Attack/Support/Macro F1-score");
    out += std::string(width + 2 + 7 + 2 + 7 + 2 + 29, '-') + "\n";
    for (const auto& r : report.rows) {
        auto scores = fmt::format("{} / {} / {}", percent(r.f1_attack), percent(r.f1_support), percent(r.f1_macro));
        std::string flags;
        if (r.incomplete) flags += fmt::format("  [incomplete: {} failed]", r.failed);
        if (r.zero_division) flags += "  [0/0 -> 0]";
        out += fmt::format("{:<{}}  {:>7}  {:>7}  {}{}\n", r.domain, width, r.n_attack, r.n_support, scores, flags);
    }
    auto headline = report.show_weighted ? report.weighted_average_macro : report.overall_average_macro;
    out += fmt::format("Average macro F1-score ({}): {:.2f}%\n", report.show_weighted ? "weighted" : "unweighted",
                       round_half_even(headline * 100.0, 2));
    return out;
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Table: return render_table(report);
        case ReportFormat::Csv: {
            std::string out = "domain,n_attack,n_support,f1_attack,f1_support,f1_macro\n";
            for (const auto& r : report.rows) {
                out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f}\n", csv_field(r.domain), r.n_attack, r.n_support,
                                   r.f1_attack, r.f1_support, r.f1_macro);
            }
            return out;
        }
        case ReportFormat::Json: return to_json(report).dump(2) + "\n";
    }
    return {};
}

}  // namespace adbl2::eval
