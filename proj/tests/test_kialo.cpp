#include "support.hpp"

#include "adbl2/kialo.hpp"

#include <doctest.h>

#include <regex>

using namespace adbl2;
using namespace adbl2::kialo;

namespace {

bool has_kind(const ParseResult& r, DiagnosticKind kind, Severity sev = Severity::Error) {
    for (const auto& d : r.diagnostics) {
        if (d.kind == kind && d.severity == sev) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("Pro and Con lines map to support and attack edges") {
    auto r = parse_kialo("1. T\n1.1. Pro: A\n1.2. Con: B");
    REQUIRE(r.ok());
    const auto& t = *r.tree;
    CHECK(t.argument(t.root()).text == "T");
    auto kids = t.children(t.root());
    REQUIRE(kids.size() == 2);
    CHECK(t.argument(kids[0]).text == "A");
    CHECK(t.edge_of(kids[0])->relation == RelationType::Support);
    CHECK(t.argument(kids[1]).text == "B");
    CHECK(t.edge_of(kids[1])->relation == RelationType::Attack);
    CHECK(r.diagnostics.empty());
}

TEST_CASE("thesis only") {
    auto r = parse_kialo("1. T");
    REQUIRE(r.ok());
    CHECK(r.tree->size() == 1);
}

TEST_CASE("structural errors") {
    CHECK(has_kind(parse_kialo("1. T\n1.1.1. Pro: X"), DiagnosticKind::DanglingNumber));
    CHECK(has_kind(parse_kialo(""), DiagnosticKind::MissingThesis));
    CHECK(has_kind(parse_kialo("1.1. Pro: X"), DiagnosticKind::DanglingNumber));
    CHECK(has_kind(parse_kialo("1. T\n1.1. Maybe: X"), DiagnosticKind::UnknownStance));
    CHECK(has_kind(parse_kialo("1. T\n1.1. Pro: X\n1.1. Con: Y"), DiagnosticKind::DuplicateNumber));
    CHECK(has_kind(parse_kialo("1. T\n2. U"), DiagnosticKind::MultipleTheses));
    CHECK(has_kind(parse_kialo("hello\n1. T"), DiagnosticKind::OrphanText));
    CHECK(has_kind(parse_kialo("1. T\n1.1. Pro:   "), DiagnosticKind::EmptyClaim));
    CHECK_FALSE(parse_kialo("1. T\n1.1.1. Pro: X").ok());
}

TEST_CASE("diagnostics carry line numbers") {
    auto r = parse_kialo("Discussion Title: x\n\n1. T\n1.1. Pro: A\n1.1.1.1. Con: Z");
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].line_number == 5);
}

TEST_CASE("title header, CRLF and continuation lines") {
    auto r = parse_kialo("Discussion Title: Sport fairness\r\n\r\n1. Level the field\r\n1.1. Con: first part\r\nsecond part\r\n");
    REQUIRE(r.ok());
    CHECK(r.title == "Sport fairness");
    auto kid = r.tree->children(r.tree->root())[0];
    CHECK(r.tree->argument(kid).text == "first part second part");
}

TEST_CASE("duplicate references are skipped with a warning") {
    auto r = parse_kialo("1. T\n1.1. Pro: A\n1.2. Con: -> See 1.1.\n1.2.1. Pro: under dup\n1.3. Con: B");
    REQUIRE(r.ok());
    CHECK(has_kind(r, DiagnosticKind::DuplicateReference, Severity::Warning));
    CHECK(r.tree->size() == 3);
}

TEST_CASE("sparse sibling numbers are accepted and renumbered densely") {
    auto r = parse_kialo("1. T\n1.3. Pro: A\n1.7. Con: B\n1.7.2. Pro: C");
    REQUIRE(r.ok());
    CHECK(serialize_kialo(*r.tree) == "1. T\n1.1. Pro: A\n1.2. Con: B\n1.2.1. Pro: C");
}

TEST_CASE("serialize single node with title") {
    DebateTree t("root text");
    CHECK(serialize_kialo(t, std::string("X")) == "Discussion Title: X\n\n1. root text");
}

TEST_CASE("worked example exports one Pro and one Con line") {
    DebateTree t("It is important for sporting bodies to level the playing field among atheletes");
    t.add_argument(t.root(),
                   "The knowledge that they will never beat a competitor like Caster Semenya can damage the "
                   "athlete's mental health",
                   RelationType::Support);
    t.add_argument(t.root(),
                   "By trying to weed out extraordinary sportswomen to cater for the majority, the sporting community "
                   "could lose extremely talented atheletes",
                   RelationType::Attack);
    auto text = serialize_kialo(t);
    CHECK(text.find("1.1. Pro: ") != std::string::npos);
    CHECK(text.find("1.2. Con: ") != std::string::npos);
    std::size_t pros = 0, cons = 0;
    for (auto p = text.find("Pro: "); p != std::string::npos; p = text.find("Pro: ", p + 1)) ++pros;
    for (auto p = text.find("Con: "); p != std::string::npos; p = text.find("Con: ", p + 1)) ++cons;
    CHECK(pros == 1);
    CHECK(cons == 1);
}

TEST_CASE("round trip on random trees and line grammar of the output") {
    std::mt19937_64 rng(2024);
    const std::regex line_grammar(R"(^[1-9][0-9]*\.([1-9][0-9]*\.)* ((Pro|Con): )?.+$)");
    for (int i = 0; i < 150; ++i) {
        auto t = test::random_tree(rng, 1 + rng() % 80, 1 + rng() % 10);
        std::optional<std::string> title;
        if (rng() & 1) title = "Debate " + std::to_string(i);
        auto text = serialize_kialo(t, title);

        auto back = parse_kialo(text);
        REQUIRE(back.ok());
        CHECK(same_structure(t, *back.tree));
        CHECK(back.title == title);
        CHECK(serialize_kialo(*back.tree, back.title) == text);

        std::size_t pos = 0;
        std::size_t line = 0;
        while (pos <= text.size()) {
            auto nl = text.find('\n', pos);
            auto l = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
            pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
            ++line;
            if (title && line <= 2) continue;
            CHECK_MESSAGE(std::regex_match(l, line_grammar), l);
        }
    }
}

TEST_CASE("parser never throws on mutated or random input") {
    std::mt19937_64 rng(99);
    std::vector<std::string> seeds;
    for (int i = 0; i < 20; ++i) seeds.push_back(serialize_kialo(test::random_tree(rng, 1 + rng() % 30, 6), "t"));
    seeds.push_back("1. T\n1.1. Pro: -> See 1.\n");
    const std::string alphabet = "0123456789.: \n\r\tProCn->See\xEF\xBB\xBF\xC3\xA9\xFF";
    for (int i = 0; i < 3000; ++i) {
        std::string s = seeds[rng() % seeds.size()];
        auto edits = 1 + rng() % 8;
        for (std::size_t k = 0; k < edits && !s.empty(); ++k) {
            auto at = rng() % s.size();
            switch (rng() % 3) {
                case 0: s[at] = alphabet[rng() % alphabet.size()]; break;
                case 1: s.erase(at, 1 + rng() % 5); break;
                case 2: s.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
            }
        }
        if (i % 10 == 0) {
            s.clear();
            for (int k = 0; k < 64; ++k) s += static_cast<char>(rng() & 0xFF);
        }
        ParseResult r;
        CHECK_NOTHROW(r = parse_kialo(s));
        if (r.ok()) {
            CHECK_FALSE(r.tree->validate().has_value());
        } else {
            CHECK(r.has_errors());
        }
    }
}

TEST_CASE("detect_domain") {
    CHECK(detect_domain("climate-change-*.txt") == "climate change");
    CHECK(detect_domain("data/Climate_Change_debate-42.txt") == "climate change");
    CHECK(detect_domain("law-politics-sports-1.txt") == "law, politics, sports");
    CHECK(detect_domain("law-school.txt") == "law");
    CHECK(detect_domain("Discussion Title: Art") == "art");
    CHECK_FALSE(detect_domain("artificial-intelligence.txt").has_value());
    CHECK_FALSE(detect_domain("cooking.txt").has_value());
    CHECK(detect_domain("climate-change-1.txt", default_domain_map(), std::string("Economics")) == "economics");
    CHECK(detect_domain("cooking.txt", default_domain_map(), std::string("Food")) == "food");

    auto custom = load_domain_map(R"({"food": "cuisine", "food-science": "science"})");
    CHECK(detect_domain("food-science-3.txt", custom) == "science");
    CHECK(detect_domain("food.txt", custom) == "cuisine");
}
