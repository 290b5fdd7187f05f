#ifndef DIABNET_EVAL_HPP
#define DIABNET_EVAL_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace diabnet {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }

    bool operator==(const ConfusionMatrix&) const = default;
};

/// Exact counts with class 1 as positive. Lengths must match and every entry
/// must be 0 or 1.
ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels);

/// accuracy = (tp+tn)/total, sensitivity = tp/(tp+fn),
/// specificity = tn/(tn+fp). A metric whose denominator is zero is nullopt
/// (rendered "-"), never NaN.
struct MetricTriple {
    std::optional<double> accuracy;
    std::optional<double> sensitivity;
    std::optional<double> specificity;

    bool operator==(const MetricTriple&) const = default;
};

MetricTriple metrics(const ConfusionMatrix& cm);

/// Whether a row was computed by this pipeline or quoted from previously
/// published results.
enum class MetricSource { Measured, Literature };

std::string to_string(MetricSource source);

struct EvalEntry {
    std::string model;
    std::string dataset;
    MetricSource source = MetricSource::Measured;
    MetricTriple values;
};

/// Published Pima-diabetes results rendered alongside measured rows for
/// context. These are reported values from prior studies — different splits
/// and seeds — and are never recomputed here.
const std::vector<EvalEntry>& reference_entries();

struct ReportDocument {
    std::string markdown;
    std::string csv;
};

/// Renders measured entries followed by reference rows. The markdown table
/// is wide (one row per model/source, an accuracy/sensitivity/specificity
/// column group per dataset, 4-decimal cells, "-" for absent or undefined
/// values); the CSV is long format with one row per (model, dataset).
ReportDocument render_report(const std::vector<EvalEntry>& entries,
                             const std::vector<EvalEntry>& references);

} // namespace diabnet

#endif // DIABNET_EVAL_HPP
