#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "malbench/dataset.hpp"

namespace malbench {

struct ColumnStats {
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation
};

// Audit trail of outlier removal: thresholds, per-column statistics and the
// row_ids that were dropped.
struct PreprocessReport {
    std::size_t rows_in = 0;
    std::size_t rows_removed = 0;
    std::vector<std::size_t> removed_row_ids;
    double z_threshold = 0.0;
    std::map<std::string, ColumnStats> per_column_stats;
    // Columns ingested as opaque categoricals (e.g. hashed identifiers);
    // they are excluded from z-filtering and standardization.
    std::vector<std::string> categorical_columns;

    nlohmann::json to_json() const;
};

// Removes every row whose z-score exceeds the threshold in any numeric
// column. Statistics are computed once over all input rows; columns with
// zero deviation define z = 0. Surviving rows are copied unmodified.
std::pair<Dataset, PreprocessReport> zscore_filter(const Dataset& data, double threshold = 3.0);

// Per-column affine transform fitted on training data only.
struct Standardization {
    std::vector<ColumnStats> stats;          // one entry per feature column
    std::vector<bool> applies;               // false for categorical columns
    std::vector<std::size_t> fitted_row_ids; // leakage audit: rows behind the stats

    void apply(Matrix& rows) const;
    void invert(Matrix& rows) const;
    nlohmann::json to_json(const FeatureSchema& schema) const;
    static Standardization from_json(const nlohmann::json& j);
};

Standardization fit_standardization(const Dataset& train);

// Transforms numeric columns of both sets to (x - mean_train) / std_train;
// zero-deviation columns map to all zeros.
std::tuple<Dataset, Dataset, Standardization> standardize(const Dataset& train,
                                                          const Dataset& test);

struct Split {
    Dataset train;
    Dataset test;
    double ratio = 0.8;
    std::uint64_t seed = 0;
    bool stratified = true;
};

// Deterministic shuffled partition; stratified keeps per-class proportions
// within one row of the ratio while train size stays floor(ratio * n).
Split split(const Dataset& data, double ratio = 0.8, std::uint64_t seed = 0,
            bool stratified = true);

}  // namespace malbench
