#pragma once

#include "adbl2/debate_tree.hpp"
#include "adbl2/prompt.hpp"
#include "adbl2/relation.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adbl2::dataset {

inline constexpr std::size_t kDefaultMaxChildDepth = 7;
inline constexpr double kDefaultTrainFraction = 0.778;

/// One classification instance: child x, parent y, label z.
struct Triple {
    std::string child_text;
    std::string parent_text;
    RelationType label = RelationType::Attack;
    std::string domain;
    std::size_t child_depth = 0;
    std::string debate_id;

    friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleDataset {
    std::vector<Triple> triples;
    /// One JSON object per pipeline step (source files, seeds, parameters).
    nlohmann::json provenance = nlohmann::json::array();
};

struct SplitSpec {
    double train_fraction = kDefaultTrainFraction;
    std::uint64_t seed = 0;
    bool by_label = true;
    bool by_domain = false;
};

struct LabelCounts {
    std::size_t attack = 0;
    std::size_t support = 0;

    std::size_t total() const noexcept { return attack + support; }
    friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

using DomainStats = std::map<std::string, LabelCounts>;

/// Portable seeded generator: mt19937_64 output with an unbiased bounded draw.
/// Sequences depend only on the seed, not on the standard library.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// One triple per edge whose child depth is at most max_child_depth, in pre-order.
std::vector<Triple> extract_triples(const DebateTree& tree, std::string_view domain, std::string_view debate_id,
                                    std::size_t max_child_depth = kDefaultMaxChildDepth);

/// A Kialo export to be turned into triples.
struct Source {
    std::string debate_id;
    std::string text;
    std::string domain;
};

/// Parses and extracts every source (in parallel), then merges ordered by
/// (debate_id, position). Throws ParseError naming the first bad source.
TripleDataset extract_dataset(const std::vector<Source>& sources, std::size_t max_child_depth = kDefaultMaxChildDepth,
                              std::size_t workers = 4);

/// Reduces both labels of every domain to that domain's minority count by seeded
/// sampling without replacement. Survivors keep their relative order.
TripleDataset undersample(const TripleDataset& dataset, std::uint64_t seed);

/// Per stratum, floor(n * train_fraction) instances go to train and the rest to
/// test after a seeded shuffle. Both outputs keep the input order.
std::pair<TripleDataset, TripleDataset> split(const TripleDataset& dataset, const SplitSpec& spec);

DomainStats dataset_stats(const TripleDataset& dataset);

/// Zero-shot prompt plus label word, one JSON object per triple.
std::vector<std::string> emit_finetune_corpus(const TripleDataset& dataset, const PromptTemplate& tmpl);

nlohmann::json to_json(const Triple& t);
Triple triple_from_json(const nlohmann::json& j);

/// JSON-lines, one triple per line, each line terminated by '\n'.
std::string write_jsonl(const TripleDataset& dataset);
/// Blank lines are ignored. Throws ParseError with the offending line number.
TripleDataset read_jsonl(std::string_view text);

/// Sidecar manifest: provenance plus summary counts.
nlohmann::json manifest(const TripleDataset& dataset);

}  // namespace adbl2::dataset
