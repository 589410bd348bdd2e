#include <doctest.h>

#include "malbench/error.hpp"
#include "malbench/knn.hpp"
#include "malbench/rng.hpp"

using namespace malbench;

namespace {

Dataset points(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
    Dataset d;
    d.rows = Matrix::from_rows(rows);
    for (std::size_t j = 0; j < d.rows.cols(); ++j)
        d.schema.columns.push_back({"c" + std::to_string(j), ColumnKind::numeric});
    d.labels = labels;
    d.row_ids.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) d.row_ids[i] = i;
    return d;
}

}  // namespace

TEST_SUITE("knn") {

TEST_CASE("k=1 on a training point returns that point's label") {
    Dataset train = points({{0, 0}, {5, 5}}, {0, 1});
    KnnConfig config;
    config.k = 1;
    KnnClassifier model(config);
    model.fit(train, 0);
    std::vector<double> scores = model.predict_scores(train.rows);
    CHECK(scores[0] == 0.0);
    CHECK(scores[1] == 1.0);
}

TEST_CASE("hand-computed distance table: score 2/3, label 1") {
    Dataset train = points({{0, 0}, {0, 1}, {5, 5}, {5, 6}}, {0, 0, 1, 1});
    KnnConfig config;
    config.k = 3;
    KnnClassifier model(config);
    model.fit(train, 0);
    Matrix query = Matrix::from_rows({{4, 5}});
    // squared distances: 41, 32, 1, 2 -> neighbors (5,5), (5,6), (0,1)
    std::vector<double> scores = model.predict_scores(query);
    CHECK(scores[0] == doctest::Approx(2.0 / 3.0));
    CHECK(model.predict_labels(query)[0] == 1);
}

TEST_CASE("k equal to the training size yields the global positive rate") {
    Dataset train = points({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}, {1, 0, 1, 0, 1});
    KnnConfig config;
    config.k = 5;
    KnnClassifier model(config);
    model.fit(train, 0);
    Matrix query = Matrix::from_rows({{10, 10}, {-5, 2}});
    for (double s : model.predict_scores(query)) CHECK(s == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("a score tie at 0.5 resolves to label 1") {
    Dataset train = points({{-1, 0}, {1, 0}}, {0, 1});
    KnnConfig config;
    config.k = 2;
    KnnClassifier model(config);
    model.fit(train, 0);
    Matrix query = Matrix::from_rows({{0, 0}});
    CHECK(model.predict_scores(query)[0] == 0.5);
    CHECK(model.predict_labels(query)[0] == 1);
}

TEST_CASE("distance ties break toward the lower training-row index") {
    Dataset a = points({{1, 0}, {-1, 0}}, {1, 0});
    Dataset b = points({{-1, 0}, {1, 0}}, {0, 1});  // same points, swapped order
    KnnConfig config;
    config.k = 1;
    Matrix query = Matrix::from_rows({{0, 0}});
    KnnClassifier ma(config), mb(config);
    ma.fit(a, 0);
    mb.fit(b, 0);
    CHECK(ma.predict_scores(query)[0] == 1.0);  // index 0 holds label 1
    CHECK(mb.predict_scores(query)[0] == 0.0);  // index 0 holds label 0
}

TEST_CASE("k larger than the training set is an error") {
    Dataset train = points({{0, 0}, {1, 1}}, {0, 1});
    KnnConfig config;
    config.k = 3;
    KnnClassifier model(config);
    try {
        model.fit(train, 0);
        FAIL("expected KTooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::k_too_large);
    }
}

TEST_CASE("scores are invariant under a consistent feature permutation") {
    Rng rng(19);
    const std::size_t n = 40, d = 6;
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) rows[i][j] = rng.normal();
        labels[i] = static_cast<int>(rng.below(2));
    }
    std::vector<std::size_t> perm = {3, 0, 5, 1, 4, 2};
    std::vector<std::vector<double>> permuted(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) permuted[i][j] = rows[i][perm[j]];

    KnnClassifier original, shuffled;
    original.fit(points(rows, labels), 0);
    shuffled.fit(points(permuted, labels), 0);

    std::vector<std::vector<double>> query_rows = {rows[0], rows[5]};
    std::vector<std::vector<double>> query_perm(2, std::vector<double>(d));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < d; ++j) query_perm[i][j] = query_rows[i][perm[j]];

    std::vector<double> s1 = original.predict_scores(Matrix::from_rows(query_rows));
    std::vector<double> s2 = shuffled.predict_scores(Matrix::from_rows(query_perm));
    CHECK(s1 == s2);
}

}  // TEST_SUITE
