#include <diabnet/errors.hpp>
#include <diabnet/preprocess.hpp>
#include <diabnet/stats.hpp>

#include <doctest.h>

#include "../support/synthetic.hpp"

#include <algorithm>
#include <map>
#include <set>

using diabnet::Dataset;
using diabnet::Rng;
using diabnet::Schema;

namespace {

Dataset dataset_with_column(std::vector<double> column, std::vector<int> labels) {
    Dataset ds;
    ds.schema.feature_names = {"x"};
    ds.schema.target_name = "y";
    ds.schema.positive_label = "1";
    ds.schema.zero_as_missing = {"x"};
    ds.features = diabnet::Matrix(column.size(), 1);
    for (std::size_t r = 0; r < column.size(); ++r) ds.features(r, 0) = column[r];
    ds.labels = std::move(labels);
    return ds;
}

std::multiset<std::pair<std::vector<double>, int>> row_multiset(const Dataset& ds) {
    std::multiset<std::pair<std::vector<double>, int>> rows;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        rows.insert({ds.features.extract_row(r), ds.labels[r]});
    }
    return rows;
}

} // namespace

TEST_CASE("imputation replaces zeros with the nonzero mean: [0,4,8] -> [6,4,8]") {
    const Dataset ds = dataset_with_column({0, 4, 8}, {1, 0, 1});
    const auto [imputed, params] = diabnet::impute_missing(ds);
    CHECK(imputed.features.extract_col(0) == std::vector<double>{6, 4, 8});
    CHECK(params.columns == std::vector<std::size_t>{0});
    CHECK(params.means == std::vector<double>{6.0});
}

TEST_CASE("imputation ignores columns not marked zero-as-missing") {
    Dataset ds = dataset_with_column({0, 4, 8}, {1, 0, 1});
    ds.schema.zero_as_missing.clear();
    const auto [imputed, params] = diabnet::impute_missing(ds);
    CHECK(imputed.features.extract_col(0) == std::vector<double>{0, 4, 8});
    CHECK(params.columns.empty());
}

TEST_CASE("an all-zero missing column cannot be imputed") {
    const Dataset ds = dataset_with_column({0, 0, 0}, {1, 0, 1});
    CHECK_THROWS_WITH_AS(diabnet::impute_missing(ds), doctest::Contains("'x'"),
                         diabnet::DegenerateColumnError);
}

TEST_CASE("fitted impute params apply to new data without refitting") {
    const Dataset fit_on = dataset_with_column({0, 4, 8}, {1, 0, 1});
    const auto params = diabnet::impute_missing(fit_on).second;
    const Dataset fresh = dataset_with_column({0, 10}, {1, 0});
    const Dataset applied = diabnet::impute_missing(fresh, params);
    CHECK(applied.features.extract_col(0) == std::vector<double>{6, 10});
}

TEST_CASE("undersampling the synthetic fixture yields exactly 268/268") {
    Rng rng(42);
    const Dataset balanced = diabnet::undersample(testsupport::synthetic_pima(), rng);
    CHECK(balanced.rows() == 536);
    CHECK(balanced.count_label(1) == 268);
    CHECK(balanced.count_label(0) == 268);

    // Every output row exists in the input (multiset containment).
    const auto input_rows = row_multiset(testsupport::synthetic_pima());
    for (const auto& row : row_multiset(balanced)) {
        CHECK(input_rows.count(row) >= 1);
    }
}

TEST_CASE("undersampling keeps the minority class intact and is seed-deterministic") {
    const Dataset ds = dataset_with_column({1, 2, 3, 4, 5, 6, 7}, {1, 1, 0, 0, 0, 0, 0});
    Rng rng_a(9), rng_b(9), rng_c(10);
    const Dataset a = diabnet::undersample(ds, rng_a);
    const Dataset b = diabnet::undersample(ds, rng_b);
    const Dataset c = diabnet::undersample(ds, rng_c);
    CHECK(a.rows() == 4);
    CHECK(a.count_label(1) == 2);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    // Different seed picks different majority rows (very likely) or at least
    // a different order; compare multisets to confirm both are valid.
    CHECK(row_multiset(c).size() == 4);

    const Dataset single = dataset_with_column({1, 2}, {1, 1});
    Rng rng_d(1);
    CHECK_THROWS_AS(diabnet::undersample(single, rng_d), diabnet::SplitError);
}

TEST_CASE("standardizer gives the fitting set mean 0 and std 1 per column") {
    const Dataset& pima = testsupport::synthetic_pima();
    const auto params = diabnet::fit_standardizer(pima);
    const Dataset scaled = diabnet::apply_standardizer(pima, params);
    const auto stats = diabnet::column_stats(scaled.features);
    for (std::size_t c = 0; c < 8; ++c) {
        CHECK(std::abs(stats.means[c]) < 1e-9);
        CHECK(std::abs(stats.stds[c] - 1.0) < 1e-9);
    }
}

TEST_CASE("standardizer rejects degenerate and mismatched inputs") {
    const Dataset constant = dataset_with_column({5, 5, 5}, {1, 0, 1});
    CHECK_THROWS_WITH_AS(diabnet::fit_standardizer(constant), doctest::Contains("'x'"),
                         diabnet::DegenerateColumnError);

    const Dataset one_row = dataset_with_column({5}, {1});
    CHECK_THROWS_AS(diabnet::fit_standardizer(one_row), diabnet::EmptyInputError);

    const Dataset ds = dataset_with_column({1, 2, 3}, {1, 0, 1});
    diabnet::ScalerParams wrong{{0.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(diabnet::apply_standardizer(ds, wrong), diabnet::ShapeError);
}

TEST_CASE("holdout split is stratified with round(count * fraction) per class") {
    Rng balance_rng(42);
    const Dataset balanced = diabnet::undersample(testsupport::synthetic_pima(), balance_rng);

    Rng rng(7);
    const auto [train, test] = diabnet::holdout_split(balanced, 0.2, rng);
    CHECK(test.rows() == 108); // llround(268 * 0.2) = 54 per class
    CHECK(test.count_label(0) == 54);
    CHECK(test.count_label(1) == 54);
    CHECK(train.rows() == 428);
    CHECK(train.count_label(0) == 214);
    CHECK(train.count_label(1) == 214);

    // Exact partition: nothing lost, nothing duplicated.
    auto combined = row_multiset(train);
    for (const auto& row : row_multiset(test)) combined.insert(row);
    CHECK(combined == row_multiset(balanced));
}

TEST_CASE("holdout split is deterministic under a fixed seed") {
    const Dataset& pima = testsupport::synthetic_pima();
    Rng rng_a(3), rng_b(3);
    const auto [train_a, test_a] = diabnet::holdout_split(pima, 0.2, rng_a);
    const auto [train_b, test_b] = diabnet::holdout_split(pima, 0.2, rng_b);
    CHECK(train_a.features == train_b.features);
    CHECK(train_a.labels == train_b.labels);
    CHECK(test_a.features == test_b.features);
    CHECK(test_a.labels == test_b.labels);
}

TEST_CASE("holdout split rejects unusable fractions and tiny classes") {
    const Dataset ds = dataset_with_column({1, 2, 3, 4}, {1, 1, 0, 0});
    Rng rng(1);
    CHECK_THROWS_AS(diabnet::holdout_split(ds, 0.0, rng), diabnet::ConfigError);
    CHECK_THROWS_AS(diabnet::holdout_split(ds, 1.0, rng), diabnet::ConfigError);
    // llround(2 * 0.1) = 0 -> empty test side for both classes.
    CHECK_THROWS_AS(diabnet::holdout_split(ds, 0.1, rng), diabnet::SplitError);

    const Dataset lonely = dataset_with_column({1, 2, 3}, {1, 0, 0});
    CHECK_THROWS_AS(diabnet::holdout_split(lonely, 0.5, rng), diabnet::SplitError);
}

TEST_CASE("kfold on 214/214 gives fold sizes 86/86/86/85/85") {
    // Balanced 428-row set like the one the tuner sees.
    std::vector<double> values(428);
    std::vector<int> labels(428);
    for (std::size_t i = 0; i < 428; ++i) {
        values[i] = static_cast<double>(i) + 1.0;
        labels[i] = i < 214 ? 0 : 1;
    }
    const Dataset ds = dataset_with_column(values, labels);

    Rng rng(11);
    const auto plan = diabnet::kfold_plan(ds, 5, rng);
    std::vector<std::size_t> sizes(5, 0);
    for (std::size_t fold : plan.assignments) ++sizes[fold];
    CHECK(sizes == std::vector<std::size_t>{86, 86, 86, 85, 85});

    // Stratification: per-class fold sizes differ by at most one.
    for (int label : {0, 1}) {
        std::map<std::size_t, std::size_t> per_fold;
        for (std::size_t i = 0; i < 428; ++i) {
            if (ds.labels[i] == label) ++per_fold[plan.assignments[i]];
        }
        std::size_t lo = 428, hi = 0;
        for (const auto& [fold, count] : per_fold) {
            lo = std::min(lo, count);
            hi = std::max(hi, count);
        }
        CHECK(hi - lo <= 1);
    }

    // train/validation indices partition the rows for every fold.
    for (std::size_t fold = 0; fold < 5; ++fold) {
        const auto tr = plan.train_indices(fold);
        const auto va = plan.validation_indices(fold);
        CHECK(tr.size() + va.size() == 428);
        std::set<std::size_t> all(tr.begin(), tr.end());
        all.insert(va.begin(), va.end());
        CHECK(all.size() == 428);
    }
}

TEST_CASE("kfold with k = n on a single-class set is leave-one-out") {
    const Dataset ds = dataset_with_column({1, 2, 3, 4, 5}, {0, 0, 0, 0, 0});
    Rng rng(2);
    const auto plan = diabnet::kfold_plan(ds, 5, rng);
    std::set<std::size_t> folds(plan.assignments.begin(), plan.assignments.end());
    CHECK(folds.size() == 5); // every fold holds exactly one row
}

TEST_CASE("kfold error paths") {
    const Dataset ds = dataset_with_column({1, 2, 3, 4, 5}, {0, 0, 0, 1, 1});
    Rng rng(2);
    CHECK_THROWS_AS(diabnet::kfold_plan(ds, 1, rng), diabnet::ConfigError);
    CHECK_THROWS_AS(diabnet::kfold_plan(ds, 6, rng), diabnet::SplitError); // 5-row class, k=6
    CHECK_THROWS_AS(diabnet::kfold_plan(ds, 3, rng), diabnet::SplitError); // 2-row class, k=3

    const Dataset empty = dataset_with_column({}, {});
    CHECK_THROWS_AS(diabnet::kfold_plan(empty, 2, rng), diabnet::EmptyInputError);
}

TEST_CASE("kfold is deterministic under a fixed seed") {
    Rng balance_rng(42);
    const Dataset balanced = diabnet::undersample(testsupport::synthetic_pima(), balance_rng);
    Rng rng_a(5), rng_b(5);
    CHECK(diabnet::kfold_plan(balanced, 5, rng_a).assignments ==
          diabnet::kfold_plan(balanced, 5, rng_b).assignments);
}
