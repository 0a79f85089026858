#pragma once

#include "adbl2/classifier.hpp"
#include "adbl2/dataset.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adbl2::eval {

struct ConfusionCounts {
    std::size_t tp_attack = 0;
    std::size_t fp_attack = 0;
    std::size_t fn_attack = 0;
    std::size_t tp_support = 0;
    std::size_t fp_support = 0;
    std::size_t fn_support = 0;

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Throws LengthMismatch on unequal or empty inputs.
ConfusionCounts accumulate(std::span<const RelationType> golds, std::span<const RelationType> preds);

/// 2tp / (2tp + fp + fn); 0 when the denominator is 0.
double f1(std::size_t tp, std::size_t fp, std::size_t fn) noexcept;

double macro_f1(double f1_attack, double f1_support) noexcept;

struct ReportRow {
    std::string domain;
    std::size_t n_attack = 0;
    std::size_t n_support = 0;
    double f1_attack = 0.0;
    double f1_support = 0.0;
    double f1_macro = 0.0;
    ConfusionCounts counts;
    std::size_t failed = 0;      // triples the backend could not classify
    bool incomplete = false;     // failed > 0
    bool zero_division = false;  // some label F1 fell back to 0 on a 0/0
};

struct EvalReport {
    std::vector<ReportRow> rows;           // ordered by domain tag
    double overall_average_macro = 0.0;    // unweighted mean of row macro F1
    double weighted_average_macro = 0.0;   // mean weighted by row size
    bool show_weighted = false;            // render the weighted mean as the headline
    std::string backend_id;
    nlohmann::json dataset_ref;
};

/// Pure reduction from gold triples and predictions (nullopt = failed
/// classification) to a report. Row numbers do not depend on input order.
EvalReport build_report(const dataset::TripleDataset& data, std::span<const std::optional<RelationType>> predictions,
                        std::string backend_id);

/// Classifies every triple (concurrently, bounded by max_in_flight) and reduces.
EvalReport evaluate(const BackendConfig& config, const dataset::TripleDataset& data);

enum class ReportFormat { Table, Csv, Json };

std::optional<ReportFormat> parse_format(std::string_view name) noexcept;

/// Round half to even at `decimals` places.
double round_half_even(double value, int decimals) noexcept;

std::string render_report(const EvalReport& report, ReportFormat format);

nlohmann::json to_json(const EvalReport& report);

}  // namespace adbl2::eval
