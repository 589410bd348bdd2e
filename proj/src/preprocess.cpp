#include "malbench/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "malbench/error.hpp"
#include "malbench/kernels.hpp"
#include "malbench/rng.hpp"

namespace malbench {

namespace {

ColumnStats column_stats(const Dataset& data, std::size_t col) {
    const std::size_t n = data.n_rows();
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = data.rows(i, col);
    ColumnStats s;
    s.mean = kern::sum(values.data(), n) / static_cast<double>(n);
    s.stddev = std::sqrt(kern::sumsq_dev(values.data(), n, s.mean) / static_cast<double>(n));
    return s;
}

}  // namespace

nlohmann::json PreprocessReport::to_json() const {
    nlohmann::json stats;
    for (const auto& [name, s] : per_column_stats)
        stats[name] = {{"mean", s.mean}, {"std", s.stddev}};
    return {{"rows_in", rows_in},
            {"rows_removed", rows_removed},
            {"removed_row_ids", removed_row_ids},
            {"z_threshold", z_threshold},
            {"per_column_stats", stats},
            {"categorical_columns", categorical_columns}};
}

std::pair<Dataset, PreprocessReport> zscore_filter(const Dataset& data, double threshold) {
    if (threshold <= 0.0) fail(ErrorKind::invalid_spec, "z threshold must be positive");
    if (data.n_rows() == 0) fail(ErrorKind::empty_dataset, "zscore_filter on empty dataset");

    PreprocessReport report;
    report.rows_in = data.n_rows();
    report.z_threshold = threshold;

    std::vector<ColumnStats> stats(data.n_features());
    for (std::size_t j = 0; j < data.n_features(); ++j) {
        const Column& col = data.schema.columns[j];
        if (col.kind == ColumnKind::categorical) {
            report.categorical_columns.push_back(col.name);
            continue;
        }
        stats[j] = column_stats(data, j);
        report.per_column_stats[col.name] = stats[j];
    }

    std::vector<std::size_t> keep;
    keep.reserve(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        bool outlier = false;
        for (std::size_t j = 0; j < data.n_features() && !outlier; ++j) {
            if (data.schema.columns[j].kind == ColumnKind::categorical) continue;
            if (stats[j].stddev == 0.0) continue;  // z defined as 0
            double z = (data.rows(i, j) - stats[j].mean) / stats[j].stddev;
            outlier = std::abs(z) > threshold;
        }
        if (outlier)
            report.removed_row_ids.push_back(data.row_ids[i]);
        else
            keep.push_back(i);
    }
    report.rows_removed = report.removed_row_ids.size();
    if (keep.empty())
        fail(ErrorKind::empty_result, "z threshold " + std::to_string(threshold) +
                                          " removed every row");
    return {dataset_subset(data, keep), std::move(report)};
}

void Standardization::apply(Matrix& rows) const {
    if (rows.cols() != stats.size())
        fail(ErrorKind::shape_mismatch, "standardization width mismatch");
    for (std::size_t j = 0; j < stats.size(); ++j) {
        if (!applies[j]) continue;
        const double mean = stats[j].mean;
        const double sd = stats[j].stddev;
        for (std::size_t i = 0; i < rows.rows(); ++i)
            rows(i, j) = sd == 0.0 ? 0.0 : (rows(i, j) - mean) / sd;
    }
}

void Standardization::invert(Matrix& rows) const {
    if (rows.cols() != stats.size())
        fail(ErrorKind::shape_mismatch, "standardization width mismatch");
    for (std::size_t j = 0; j < stats.size(); ++j) {
        if (!applies[j]) continue;
        for (std::size_t i = 0; i < rows.rows(); ++i) {
            if (stats[j].stddev == 0.0)
                rows(i, j) = stats[j].mean;
            else
                rows(i, j) = rows(i, j) * stats[j].stddev + stats[j].mean;
        }
    }
}

nlohmann::json Standardization::to_json(const FeatureSchema& schema) const {
    nlohmann::json cols = nlohmann::json::array();
    for (std::size_t j = 0; j < stats.size(); ++j)
        cols.push_back({{"name", schema.columns[j].name},
                        {"mean", stats[j].mean},
                        {"std", stats[j].stddev},
                        {"applies", static_cast<bool>(applies[j])}});
    return {{"columns", cols}};
}

Standardization Standardization::from_json(const nlohmann::json& j) {
    Standardization s;
    for (const auto& c : j.at("columns")) {
        s.stats.push_back({c.at("mean").get<double>(), c.at("std").get<double>()});
        s.applies.push_back(c.at("applies").get<bool>());
    }
    return s;
}

Standardization fit_standardization(const Dataset& train) {
    if (train.n_rows() == 0) fail(ErrorKind::empty_dataset, "standardize on empty training set");
    Standardization s;
    s.stats.resize(train.n_features());
    s.applies.resize(train.n_features(), true);
    for (std::size_t j = 0; j < train.n_features(); ++j) {
        if (train.schema.columns[j].kind == ColumnKind::categorical) {
            s.applies[j] = false;
            continue;
        }
        s.stats[j] = column_stats(train, j);
    }
    s.fitted_row_ids = train.row_ids;
    return s;
}

std::tuple<Dataset, Dataset, Standardization> standardize(const Dataset& train,
                                                          const Dataset& test) {
    Standardization scaler = fit_standardization(train);
    Dataset train_out = train;
    Dataset test_out = test;
    scaler.apply(train_out.rows);
    if (test_out.n_rows() > 0) scaler.apply(test_out.rows);
    return {std::move(train_out), std::move(test_out), std::move(scaler)};
}

Split split(const Dataset& data, double ratio, std::uint64_t seed, bool stratified) {
    if (!(ratio > 0.0 && ratio < 1.0))
        fail(ErrorKind::invalid_ratio, "split ratio must lie in (0,1)");
    const std::size_t n = data.n_rows();
    if (n == 0) fail(ErrorKind::empty_dataset, "split on empty dataset");

    const std::size_t target_train = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(n)));

    std::vector<std::size_t> train_idx, test_idx;
    Rng rng(seed);

    if (stratified) {
        std::vector<std::size_t> by_class[2];
        for (std::size_t i = 0; i < n; ++i) by_class[data.labels[i]].push_back(i);
        if (by_class[0].empty() || by_class[1].empty())
            fail(ErrorKind::insufficient_class_rows,
                 "stratified split needs at least one row of each class");

        std::size_t takes[2];
        double remainders[2];
        for (int c = 0; c < 2; ++c) {
            double exact = ratio * static_cast<double>(by_class[c].size());
            takes[c] = static_cast<std::size_t>(std::floor(exact));
            remainders[c] = exact - static_cast<double>(takes[c]);
            rng.shuffle(by_class[c]);
        }
        // Round per-class floors up until the overall train size is exact;
        // the class with the larger fractional remainder rounds first.
        while (takes[0] + takes[1] < target_train) {
            int c = remainders[0] > remainders[1]   ? 0
                    : remainders[1] > remainders[0] ? 1
                    : (by_class[0].size() >= by_class[1].size() ? 0 : 1);
            takes[c] += 1;
            remainders[c] = -1.0;
        }
        for (int c = 0; c < 2; ++c) {
            for (std::size_t i = 0; i < by_class[c].size(); ++i)
                (i < takes[c] ? train_idx : test_idx).push_back(by_class[c][i]);
        }
    } else {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(order);
        for (std::size_t i = 0; i < n; ++i)
            (i < target_train ? train_idx : test_idx).push_back(order[i]);
    }

    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    Split result;
    result.train = dataset_subset(data, train_idx);
    result.test = dataset_subset(data, test_idx);
    result.ratio = ratio;
    result.seed = seed;
    result.stratified = stratified;
    return result;
}

}  // namespace malbench
