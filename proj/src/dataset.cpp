#include "adbl2/dataset.hpp"
#include "adbl2/error.hpp"
#include "adbl2/kialo.hpp"
#include "adbl2/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

namespace adbl2::dataset {

using nlohmann::json;

std::uint64_t SeededRng::below(std::uint64_t bound) {
    if (bound == 0) throw Error(ErrorCode::InvalidArgument, "bound must be positive");
    // Reject the tail that would bias the modulo.
    const auto limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        auto x = engine_();
        if (x < limit) return x % bound;
    }
}

std::vector<Triple> extract_triples(const DebateTree& tree, std::string_view domain, std::string_view debate_id,
                                    std::size_t max_child_depth) {
    std::vector<Triple> out;
    for (const auto& edge : tree.edges()) {
        auto d = tree.depth(edge.child);
        if (d > max_child_depth) continue;
        out.push_back({tree.argument(edge.child).text, tree.argument(edge.parent).text, edge.relation,
                       std::string(domain), d, std::string(debate_id)});
    }
    return out;
}

TripleDataset extract_dataset(const std::vector<Source>& sources, std::size_t max_child_depth, std::size_t workers) {
    std::vector<std::vector<Triple>> per_source(sources.size());
    std::vector<std::optional<std::string>> failures(sources.size());

    parallel_for_index(sources.size(), workers, [&](std::size_t i) {
        auto parsed = kialo::parse_kialo(sources[i].text);
        if (!parsed.ok()) {
            for (const auto& d : parsed.diagnostics) {
                if (d.severity != kialo::Severity::Error) continue;
                failures[i] = fmt::format("{}:{}: {}", sources[i].debate_id, d.line_number, d.message);
                break;
            }
            return;
        }
        per_source[i] = extract_triples(*parsed.tree, sources[i].domain, sources[i].debate_id, max_child_depth);
    });
    for (const auto& f : failures) {
        if (f) throw Error(ErrorCode::ParseError, *f);
    }

    std::vector<std::size_t> order(sources.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sources[a].debate_id < sources[b].debate_id; });

    TripleDataset out;
    json files = json::array();
    for (auto i : order) {
        out.triples.insert(out.triples.end(), per_source[i].begin(), per_source[i].end());
        files.push_back({{"debate_id", sources[i].debate_id}, {"domain", sources[i].domain},
                         {"triples", per_source[i].size()}});
    }
    out.provenance.push_back({{"step", "extract"}, {"max_child_depth", max_child_depth}, {"sources", files}});
    return out;
}

TripleDataset undersample(const TripleDataset& dataset, std::uint64_t seed) {
    if (dataset.triples.empty()) throw Error(ErrorCode::InvalidArgument, "cannot undersample an empty dataset");

    // Indices per (domain, label); std::map keeps domains in a fixed order for the RNG.
    std::map<std::string, std::array<std::vector<std::size_t>, 2>> groups;
    for (std::size_t i = 0; i < dataset.triples.size(); ++i) {
        const auto& t = dataset.triples[i];
        groups[t.domain][static_cast<int>(t.label)].push_back(i);
    }

    SeededRng rng(seed);
    std::vector<std::size_t> keep;
    for (auto& [domain, by_label] : groups) {
        auto target = std::min(by_label[0].size(), by_label[1].size());
        for (auto& indices : by_label) {
            if (indices.size() > target) {
                // Partial Fisher-Yates: the first `target` slots become a uniform sample.
                for (std::size_t i = 0; i < target; ++i) {
                    auto j = i + static_cast<std::size_t>(rng.below(indices.size() - i));
                    std::swap(indices[i], indices[j]);
                }
                indices.resize(target);
            }
            keep.insert(keep.end(), indices.begin(), indices.end());
        }
    }
    std::sort(keep.begin(), keep.end());

    TripleDataset out;
    out.triples.reserve(keep.size());
    for (auto i : keep) out.triples.push_back(dataset.triples[i]);
    out.provenance = dataset.provenance;
    out.provenance.push_back({{"step", "undersample"}, {"seed", seed}, {"input", dataset.triples.size()},
                              {"output", out.triples.size()}, {"rng", "mt19937_64"}});
    return out;
}

std::pair<TripleDataset, TripleDataset> split(const TripleDataset& dataset, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("train_fraction must lie in (0, 1), got {}", spec.train_fraction));
    }
    if (dataset.triples.empty()) throw Error(ErrorCode::EmptyStratum, "cannot split an empty dataset");

    using Key = std::pair<std::string, int>;
    std::map<Key, std::vector<std::size_t>> strata;
    std::set<std::string> domains;
    for (std::size_t i = 0; i < dataset.triples.size(); ++i) {
        const auto& t = dataset.triples[i];
        domains.insert(t.domain);
        Key key{spec.by_domain ? t.domain : std::string(), spec.by_label ? static_cast<int>(t.label) : -1};
        strata[key].push_back(i);
    }
    if (spec.by_label) {
        auto scopes = spec.by_domain ? domains : std::set<std::string>{std::string()};
        for (const auto& scope : scopes) {
            for (int label : {0, 1}) {
                if (!strata.contains({scope, label})) {
                    throw Error(ErrorCode::EmptyStratum,
                                fmt::format("no {} instances{}", to_string(static_cast<RelationType>(label)),
                                            scope.empty() ? std::string() : " in domain '" + scope + "'"));
                }
            }
        }
    }

    SeededRng rng(spec.seed);
    std::vector<char> in_train(dataset.triples.size(), 0);
    for (auto& [key, indices] : strata) {
        // The epsilon absorbs binary representation error in the fraction, e.g. 0.778 * 500.
        auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(indices.size()) * spec.train_fraction + 1e-9));
        rng.shuffle(indices);
        for (std::size_t i = 0; i < n_train; ++i) in_train[indices[i]] = 1;
    }

    TripleDataset train, test;
    for (std::size_t i = 0; i < dataset.triples.size(); ++i) {
        (in_train[i] ? train : test).triples.push_back(dataset.triples[i]);
    }
    json step = {{"step", "split"},       {"seed", spec.seed},          {"train_fraction", spec.train_fraction},
                 {"by_label", spec.by_label}, {"by_domain", spec.by_domain}, {"train", train.triples.size()},
                 {"test", test.triples.size()}, {"rng", "mt19937_64"}};
    train.provenance = dataset.provenance;
    train.provenance.push_back(step);
    train.provenance.back()["part"] = "train";
    test.provenance = dataset.provenance;
    test.provenance.push_back(step);
    test.provenance.back()["part"] = "test";
    return {std::move(train), std::move(test)};
}

DomainStats dataset_stats(const TripleDataset& dataset) {
    DomainStats stats;
    for (const auto& t : dataset.triples) {
        auto& c = stats[t.domain];
        (t.label == RelationType::Attack ? c.attack : c.support) += 1;
    }
    return stats;
}

std::vector<std::string> emit_finetune_corpus(const TripleDataset& dataset, const PromptTemplate& tmpl) {
    validate_template(tmpl);
    auto technique = PromptTechnique::zero_shot();
    std::vector<std::string> records;
    records.reserve(dataset.triples.size());
    for (const auto& t : dataset.triples) {
        json rec = {{"prompt", build_prompt(tmpl, technique, t.parent_text, t.child_text)},
                    {"completion", tmpl.word_for(t.label)}};
        records.push_back(rec.dump());
    }
    return records;
}

json to_json(const Triple& t) {
    return {{"child_text", t.child_text}, {"parent_text", t.parent_text}, {"label", to_string(t.label)},
            {"domain", t.domain},         {"child_depth", t.child_depth}, {"debate_id", t.debate_id}};
}

Triple triple_from_json(const json& j) {
    Triple t;
    t.child_text = j.at("child_text").get<std::string>();
    t.parent_text = j.at("parent_text").get<std::string>();
    auto label = parse_relation(j.at("label").get<std::string>());
    if (!label) throw Error(ErrorCode::ParseError, "label must be attack or support");
    t.label = *label;
    t.domain = j.value("domain", std::string());
    t.child_depth = j.value("child_depth", std::size_t{0});
    t.debate_id = j.value("debate_id", std::string());
    if (trim_text(t.child_text).empty() || trim_text(t.parent_text).empty()) {
        throw Error(ErrorCode::ParseError, "triple has empty text");
    }
    return t;
}

std::string write_jsonl(const TripleDataset& dataset) {
    std::string out;
    for (const auto& t : dataset.triples) {
        out += to_json(t).dump();
        out += '\n';
    }
    return out;
}

TripleDataset read_jsonl(std::string_view text) {
    TripleDataset out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (trim_text(line).empty()) continue;
        try {
            out.triples.push_back(triple_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", line_no, e.what()));
        }
    }
    return out;
}

json manifest(const TripleDataset& dataset) {
    json counts = json::object();
    for (const auto& [domain, c] : dataset_stats(dataset)) {
        counts[domain] = {{"attack", c.attack}, {"support", c.support}};
    }
    return {{"triples", dataset.triples.size()}, {"counts", counts}, {"provenance", dataset.provenance}};
}

}  // namespace adbl2::dataset
