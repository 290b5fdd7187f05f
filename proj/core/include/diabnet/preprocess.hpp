#ifndef DIABNET_PREPROCESS_HPP
#define DIABNET_PREPROCESS_HPP

#include "diabnet/dataset.hpp"
#include "diabnet/rng.hpp"

#include <cstddef>
#include <vector>

namespace diabnet {

/// Per-column replacement means for zero-as-missing features, fitted on
/// training rows only.
struct ImputeParams {
    std::vector<std::size_t> columns; // feature indices, in schema order
    std::vector<double> means;        // mean of the nonzero training values
};

/// Fits replacement means on ds (the training set) and applies them: zeros in
/// each schema.zero_as_missing column become that column's nonzero mean.
std::pair<Dataset, ImputeParams> impute_missing(const Dataset& ds);

/// Applies previously fitted means, e.g. to a test split.
Dataset impute_missing(const Dataset& ds, const ImputeParams& params);

/// Balances classes by discarding uniformly sampled majority rows until both
/// classes have the minority count. Output row order is shuffled.
Dataset undersample(const Dataset& ds, Rng& rng);

/// Standardization parameters (feature units), fitted on training rows only.
struct ScalerParams {
    std::vector<double> means;
    std::vector<double> stds; // population convention, all > 0
};

ScalerParams fit_standardizer(const Dataset& train);
Dataset apply_standardizer(const Dataset& ds, const ScalerParams& params);

/// Stratified train/test partition. Per-class test counts are
/// round(class_count * test_fraction).
std::pair<Dataset, Dataset> holdout_split(const Dataset& ds, double test_fraction, Rng& rng);

struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignments; // fold index per row, in [0, k)

    std::vector<std::size_t> train_indices(std::size_t fold) const;
    std::vector<std::size_t> validation_indices(std::size_t fold) const;
};

/// Stratified k-fold assignment; per-class fold sizes differ by at most one.
FoldPlan kfold_plan(const Dataset& ds, std::size_t k, Rng& rng);

} // namespace diabnet

#endif // DIABNET_PREPROCESS_HPP
