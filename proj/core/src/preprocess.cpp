#include "diabnet/preprocess.hpp"

#include "diabnet/errors.hpp"
#include "diabnet/stats.hpp"

#include <algorithm>
#include <cmath>

namespace diabnet {

std::pair<Dataset, ImputeParams> impute_missing(const Dataset& ds) {
    ImputeParams params;
    for (const auto& name : ds.schema.zero_as_missing) {
        const std::size_t col = ds.schema.feature_index(name);
        double sum = 0.0;
        std::size_t nonzero = 0;
        for (std::size_t r = 0; r < ds.rows(); ++r) {
            const double v = ds.features(r, col);
            if (v != 0.0) {
                sum += v;
                ++nonzero;
            }
        }
        if (ds.rows() > 0 && nonzero == 0) {
            throw DegenerateColumnError("impute_missing: column '" + name +
                                        "' contains only zeros");
        }
        params.columns.push_back(col);
        params.means.push_back(nonzero == 0 ? 0.0 : sum / static_cast<double>(nonzero));
    }
    return {impute_missing(ds, params), params};
}

Dataset impute_missing(const Dataset& ds, const ImputeParams& params) {
    Dataset out = ds;
    for (std::size_t i = 0; i < params.columns.size(); ++i) {
        const std::size_t col = params.columns[i];
        if (col >= out.cols()) {
            throw ShapeError("impute_missing: column index " + std::to_string(col) +
                             " out of range for " + out.features.shape_str() + " features");
        }
        for (std::size_t r = 0; r < out.rows(); ++r) {
            if (out.features(r, col) == 0.0) {
                out.features(r, col) = params.means[i];
            }
        }
    }
    return out;
}

Dataset undersample(const Dataset& ds, Rng& rng) {
    const auto positives = ds.indices_of(1);
    const auto negatives = ds.indices_of(0);
    if (positives.empty() || negatives.empty()) {
        throw SplitError("undersample: both classes must be present (" +
                         std::to_string(negatives.size()) + " negative, " +
                         std::to_string(positives.size()) + " positive)");
    }

    const auto& minority = positives.size() <= negatives.size() ? positives : negatives;
    const auto& majority = positives.size() <= negatives.size() ? negatives : positives;

    std::vector<std::size_t> kept = minority;
    for (std::size_t pick : rng.sample_without_replacement(majority.size(), minority.size())) {
        kept.push_back(majority[pick]);
    }
    rng.shuffle(kept);
    return ds.select(kept);
}

ScalerParams fit_standardizer(const Dataset& train) {
    if (train.rows() < 2) {
        throw EmptyInputError("fit_standardizer: need at least 2 rows, got " +
                              std::to_string(train.rows()));
    }
    const ColumnStats stats = column_stats(train.features);
    for (std::size_t c = 0; c < stats.stds.size(); ++c) {
        if (stats.stds[c] == 0.0) {
            throw DegenerateColumnError("fit_standardizer: feature '" +
                                        train.schema.feature_names[c] +
                                        "' has zero variance");
        }
    }
    return {stats.means, stats.stds};
}

Dataset apply_standardizer(const Dataset& ds, const ScalerParams& params) {
    if (ds.cols() != params.means.size() || ds.cols() != params.stds.size()) {
        throw ShapeError("apply_standardizer: " + std::to_string(params.means.size()) +
                         " fitted columns vs " + ds.features.shape_str() + " features");
    }
    Dataset out = ds;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.features.row(r);
        for (std::size_t c = 0; c < out.cols(); ++c) {
            row[c] = (row[c] - params.means[c]) / params.stds[c];
        }
    }
    return out;
}

std::pair<Dataset, Dataset> holdout_split(const Dataset& ds, double test_fraction, Rng& rng) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("holdout_split: test_fraction must be in (0, 1), got " +
                          std::to_string(test_fraction));
    }

    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (int label : {0, 1}) {
        auto members = ds.indices_of(label);
        if (members.size() < 2) {
            throw SplitError("holdout_split: class " + std::to_string(label) + " has " +
                             std::to_string(members.size()) + " rows, need at least 2");
        }
        const auto take = static_cast<std::size_t>(
            std::llround(static_cast<double>(members.size()) * test_fraction));
        if (take == 0 || take == members.size()) {
            throw SplitError("holdout_split: fraction " + std::to_string(test_fraction) +
                             " leaves an empty side for class " + std::to_string(label) +
                             " (" + std::to_string(members.size()) + " rows)");
        }
        rng.shuffle(members);
        test_idx.insert(test_idx.end(), members.begin(), members.begin() + take);
        train_idx.insert(train_idx.end(), members.begin() + take, members.end());
    }

    // Row order within each side is made independent of the class grouping above.
    rng.shuffle(train_idx);
    rng.shuffle(test_idx);
    return {ds.select(train_idx), ds.select(test_idx)};
}

FoldPlan kfold_plan(const Dataset& ds, std::size_t k, Rng& rng) {
    if (k < 2) {
        throw ConfigError("kfold_plan: k must be at least 2, got " + std::to_string(k));
    }
    if (ds.rows() == 0) {
        throw EmptyInputError("kfold_plan: dataset has no rows");
    }

    FoldPlan plan;
    plan.k = k;
    plan.assignments.assign(ds.rows(), 0);

    // Round-robin dealing with a cursor carried across classes, so the
    // oversized folds of one class line up with the undersized folds of the
    // next and total fold sizes stay within one of each other.
    std::size_t cursor = 0;
    for (int label : {0, 1}) {
        auto members = ds.indices_of(label);
        if (members.empty()) continue;
        if (members.size() < k) {
            throw SplitError("kfold_plan: class " + std::to_string(label) + " has " +
                             std::to_string(members.size()) + " rows, fewer than k=" +
                             std::to_string(k));
        }
        rng.shuffle(members);
        for (std::size_t row : members) {
            plan.assignments[row] = cursor % k;
            ++cursor;
        }
    }
    return plan;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::validation_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) out.push_back(i);
    }
    return out;
}

} // namespace diabnet
