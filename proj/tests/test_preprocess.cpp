#include <doctest.h>

#include <cmath>
#include <map>

#include "malbench/error.hpp"
#include "malbench/preprocess.hpp"
#include "malbench/rng.hpp"

using namespace malbench;

namespace {

Dataset one_column(const std::vector<double>& values, const std::vector<int>& labels) {
    Dataset d;
    d.schema.columns = {{"x", ColumnKind::numeric}};
    d.rows = Matrix(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) d.rows(i, 0) = values[i];
    d.labels = labels;
    d.row_ids.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) d.row_ids[i] = i;
    return d;
}

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
    SynthSpec spec{n, d, d / 2, 1.0, 0.0, seed};
    return synth_generate(spec);
}

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("huge threshold keeps everything") {
    Dataset data = random_dataset(200, 4, 1);
    auto [kept, report] = zscore_filter(data, 1e12);
    CHECK(kept.n_rows() == data.n_rows());
    CHECK(report.rows_removed == 0);
    CHECK(kept.rows == data.rows);
}

TEST_CASE("single outlier column, recomputed by hand") {
    // the outlier inflates the column deviation enough that its own z-score
    // is just short of 2, so the default threshold keeps it
    Dataset data = one_column({1, 2, 3, 2, 1000}, {0, 1, 0, 1, 0});
    const double mean = (1.0 + 2.0 + 3.0 + 2.0 + 1000.0) / 5.0;
    double var = 0;
    for (double v : {1.0, 2.0, 3.0, 2.0, 1000.0}) var += (v - mean) * (v - mean);
    var /= 5.0;
    const double z_outlier = (1000.0 - mean) / std::sqrt(var);
    CHECK(z_outlier == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(z_outlier < 3.0);

    auto [kept3, report3] = zscore_filter(data, 3.0);
    CHECK(report3.rows_removed == 0);

    auto [kept19, report19] = zscore_filter(data, 1.9);
    CHECK(report19.rows_removed == 1);
    CHECK(report19.removed_row_ids == std::vector<std::size_t>{4});
    CHECK(kept19.n_rows() == 4);

    CHECK(report3.per_column_stats.at("x").mean == doctest::Approx(mean));
    CHECK(report3.per_column_stats.at("x").stddev == doctest::Approx(std::sqrt(var)));
}

TEST_CASE("constant column defines z = 0 and removes nothing") {
    Dataset data = one_column({5, 5, 5, 5}, {0, 1, 0, 1});
    auto [kept, report] = zscore_filter(data, 0.5);
    CHECK(report.rows_removed == 0);
    CHECK(kept.n_rows() == 4);
}

TEST_CASE("threshold that removes every row is an error") {
    Dataset data = one_column({1, 2}, {0, 1});
    CHECK_THROWS_AS(zscore_filter(data, 0.001), Error);
    try {
        zscore_filter(data, 0.001);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_result);
    }
    CHECK_THROWS_AS(zscore_filter(data, -1.0), Error);
}

TEST_CASE("survivors pass through unmodified") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Dataset data = random_dataset(300, 5, seed);
        auto [kept, report] = zscore_filter(data, 1.5);
        std::map<std::size_t, std::size_t> source;  // row_id -> input row index
        for (std::size_t i = 0; i < data.n_rows(); ++i) source[data.row_ids[i]] = i;
        for (std::size_t i = 0; i < kept.n_rows(); ++i) {
            const std::size_t src = source.at(kept.row_ids[i]);
            for (std::size_t j = 0; j < kept.n_features(); ++j)
                CHECK(kept.rows(i, j) == data.rows(src, j));
            CHECK(kept.labels[i] == data.labels[src]);
        }
        CHECK(kept.n_rows() + report.rows_removed == data.n_rows());
    }
}

TEST_CASE("categorical columns are exempt from filtering") {
    Dataset data = one_column({1, 2, 3, 2, 1000}, {0, 1, 0, 1, 0});
    data.schema.columns[0].kind = ColumnKind::categorical;
    auto [kept, report] = zscore_filter(data, 0.1);
    CHECK(report.rows_removed == 0);
    CHECK(report.categorical_columns == std::vector<std::string>{"x"});
    CHECK(report.per_column_stats.empty());
}

TEST_CASE("standardize centers and scales on training statistics") {
    Dataset train = random_dataset(500, 3, 2);
    Dataset test = random_dataset(100, 3, 3);
    auto [std_train, std_test, scaler] = standardize(train, test);

    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0;
        for (std::size_t i = 0; i < std_train.n_rows(); ++i) mean += std_train.rows(i, j);
        mean /= static_cast<double>(std_train.n_rows());
        double var = 0;
        for (std::size_t i = 0; i < std_train.n_rows(); ++i)
            var += (std_train.rows(i, j) - mean) * (std_train.rows(i, j) - mean);
        var /= static_cast<double>(std_train.n_rows());
        CHECK(std::fabs(mean) < 1e-9);
        CHECK(std::fabs(std::sqrt(var) - 1.0) < 1e-9);
    }

    // a test value equal to the training mean maps to exactly zero
    Dataset probe = test;
    probe.rows(0, 0) = scaler.stats[0].mean;
    scaler.apply(probe.rows);
    CHECK(probe.rows(0, 0) == 0.0);
}

TEST_CASE("standardize maps constant columns to zeros in both sets") {
    Dataset train = one_column({7, 7, 7}, {0, 1, 0});
    Dataset test = one_column({7, 9}, {0, 1});
    auto [std_train, std_test, scaler] = standardize(train, test);
    for (std::size_t i = 0; i < std_train.n_rows(); ++i) CHECK(std_train.rows(i, 0) == 0.0);
    for (std::size_t i = 0; i < std_test.n_rows(); ++i) CHECK(std_test.rows(i, 0) == 0.0);
}

TEST_CASE("standardize inverse transform round-trips training values") {
    Dataset train = random_dataset(200, 4, 9);
    auto [std_train, std_test, scaler] = standardize(train, train);
    Matrix recovered = std_train.rows;
    scaler.invert(recovered);
    for (std::size_t i = 0; i < train.n_rows(); ++i)
        for (std::size_t j = 0; j < train.n_features(); ++j) {
            const double a = train.rows(i, j);
            CHECK(std::fabs(recovered(i, j) - a) <= 1e-9 * std::max(1.0, std::fabs(a)));
        }
}

TEST_CASE("80/20 split of 100k rows lands exactly on 80000/20000") {
    Dataset data = random_dataset(100000, 3, 4);
    Split parts = split(data, 0.8, 42, true);
    CHECK(parts.train.n_rows() == 80000);
    CHECK(parts.test.n_rows() == 20000);
}

TEST_CASE("split is deterministic for a fixed seed") {
    Dataset data = random_dataset(500, 3, 5);
    Split a = split(data, 0.7, 99, true);
    Split b = split(data, 0.7, 99, true);
    CHECK(a.train.row_ids == b.train.row_ids);
    CHECK(a.test.row_ids == b.test.row_ids);
    Split c = split(data, 0.7, 100, true);
    CHECK(a.train.row_ids != c.train.row_ids);
}

TEST_CASE("stratified 5/5 rows at 0.8 puts 4 of each class in train") {
    Dataset data = one_column({0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
                              {0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    Split parts = split(data, 0.8, 1, true);
    CHECK(parts.train.n_rows() == 8);
    CHECK(parts.train.count_positive() == 4);
    CHECK(parts.test.count_positive() == 1);
}

TEST_CASE("split partition property under fuzzing") {
    Rng rng(31);
    for (int round = 0; round < 60; ++round) {
        const std::size_t n = 2 + rng.below(300);
        Dataset data = random_dataset(std::max<std::size_t>(n, 2), 2, 70 + round);
        const double ratio = 0.05 + 0.9 * rng.uniform01();
        const bool stratified = rng.below(2) == 0;
        Split parts = split(data, ratio, rng.next_u64(), stratified);

        const std::size_t expected_train =
            static_cast<std::size_t>(std::floor(ratio * static_cast<double>(data.n_rows())));
        CHECK(parts.train.n_rows() == expected_train);
        CHECK(parts.train.n_rows() + parts.test.n_rows() == data.n_rows());

        std::vector<std::size_t> ids = parts.train.row_ids;
        ids.insert(ids.end(), parts.test.row_ids.begin(), parts.test.row_ids.end());
        std::sort(ids.begin(), ids.end());
        CHECK(ids == data.row_ids);  // disjoint and covering

        if (stratified) {
            std::size_t pos_total = data.count_positive();
            const double expected_pos = ratio * static_cast<double>(pos_total);
            CHECK(std::fabs(static_cast<double>(parts.train.count_positive()) - expected_pos) <=
                  1.0 + 1e-9);
        }
    }
}

TEST_CASE("split rejects bad ratios") {
    Dataset data = random_dataset(10, 2, 6);
    CHECK_THROWS_AS(split(data, 0.0, 1, true), Error);
    CHECK_THROWS_AS(split(data, 1.0, 1, true), Error);
    Dataset single = one_column({1, 2, 3}, {1, 1, 1});
    CHECK_THROWS_AS(split(single, 0.5, 1, true), Error);
}

}  // TEST_SUITE
