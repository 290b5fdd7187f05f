#include "diabnet/eval.hpp"

namespace diabnet {

// Previously published Pima-diabetes results quoted verbatim in reports.
// These are reported values on their authors' own splits; this pipeline
// never recomputes them. Missing cells (nullopt) were not reported.
const std::vector<EvalEntry>& reference_entries() {
    static const std::vector<EvalEntry> rows = {
        {"CkNN", "pima", MetricSource::Literature, {0.7816, 0.6184, 0.8738}},
        {"GDA-LS-SVM", "pima", MetricSource::Literature, {0.7916, 0.8333, 0.8205}},
        {"GA-MLP", "pima", MetricSource::Literature, {0.8040, std::nullopt, std::nullopt}},
        {"GRNN", "pima", MetricSource::Literature, {0.8021, std::nullopt, std::nullopt}},
        {"MLFNN", "pima", MetricSource::Literature, {0.8173, std::nullopt, std::nullopt}},
        {"BPNN + BatchNorm (published)", "pima", MetricSource::Literature,
         {0.8981, 0.8929, 0.9038}},
    };
    return rows;
}

} // namespace diabnet
