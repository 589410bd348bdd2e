#include <doctest.h>

#include "malbench/dataset.hpp"
#include "malbench/forest.hpp"
#include "malbench/rng.hpp"

using namespace malbench;

namespace {

Dataset xor_points() {
    Dataset d;
    d.schema.columns = {{"x0", ColumnKind::numeric}, {"x1", ColumnKind::numeric}};
    d.rows = Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    d.labels = {0, 1, 1, 0};
    d.row_ids = {0, 1, 2, 3};
    return d;
}

std::vector<std::size_t> identity(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

}  // namespace

TEST_SUITE("forest") {

TEST_CASE("pure labels make the root a leaf") {
    Dataset d = xor_points();
    d.labels = {1, 1, 1, 1};
    DecisionTree tree = fit_tree(d.rows, d.labels, identity(4), {}, 0);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].leaf);
    CHECK(tree.nodes[0].leaf_score == 1.0);
}

TEST_CASE("depth-2 tree with all features shatters XOR") {
    Dataset d = xor_points();
    TreeConfig config;
    config.max_depth = 2;
    config.features_per_split = FeatureSampling::all_features;
    DecisionTree tree = fit_tree(d.rows, d.labels, identity(4), config, 0);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(tree.predict(d.rows.row(i)) == static_cast<double>(d.labels[i]));
}

TEST_CASE("a depth-1 stump cannot shatter XOR") {
    Dataset d = xor_points();
    TreeConfig config;
    config.max_depth = 1;
    config.features_per_split = FeatureSampling::all_features;
    DecisionTree tree = fit_tree(d.rows, d.labels, identity(4), config, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < 4; ++i)
        correct += static_cast<std::size_t>((tree.predict(d.rows.row(i)) >= 0.5 ? 1 : 0) ==
                                            d.labels[i]);
    CHECK(correct < 4);
    CHECK(tree.nodes.size() <= 3);
}

TEST_CASE("leaf scores are positive fractions") {
    Dataset d = xor_points();
    TreeConfig config;
    config.min_samples_split = 10;  // forces a single leaf
    DecisionTree tree = fit_tree(d.rows, d.labels, identity(4), config, 0);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].leaf_score == 0.5);
}

TEST_CASE("same seed, same forest predictions") {
    Dataset data = synth_generate({300, 5, 3, 1.5, 0.1, 3});
    ForestConfig config;
    config.n_trees = 15;
    ForestClassifier a(config), b(config);
    a.fit(data, 42);
    b.fit(data, 42);
    Dataset probe = synth_generate({50, 5, 3, 1.5, 0.1, 4});
    CHECK(a.predict_scores(probe.rows) == b.predict_scores(probe.rows));

    ForestClassifier c(config);
    c.fit(data, 43);
    CHECK(a.predict_scores(probe.rows) != c.predict_scores(probe.rows));
}

TEST_CASE("single tree without bootstrap equals the forest of one") {
    Dataset data = synth_generate({200, 4, 2, 2.0, 0.05, 6});
    ForestConfig config;
    config.n_trees = 1;
    config.bootstrap = false;
    config.tree.features_per_split = FeatureSampling::all_features;
    ForestClassifier forest(config);
    forest.fit(data, 11);

    DecisionTree tree = fit_tree(data.rows, data.labels,
                                 identity(data.n_rows()), config.tree, derive_seed(11, 0));
    Dataset probe = synth_generate({80, 4, 2, 2.0, 0.05, 7});
    std::vector<double> forest_scores = forest.predict_scores(probe.rows);
    for (std::size_t i = 0; i < probe.n_rows(); ++i)
        CHECK(forest_scores[i] == tree.predict(probe.rows.row(i)));
}

TEST_CASE("informative features collect the importance mass") {
    Dataset data = synth_generate({600, 6, 2, 4.0, 0.0, 9});
    ForestConfig config;
    config.n_trees = 30;
    ForestClassifier model(config);
    model.fit(data, 5);
    const auto& importance = model.feature_importance();
    REQUIRE(importance.size() == 6);
    // the two informative columns are f0 and f1
    double informative = importance[0] + importance[1];
    double noise = 0;
    for (std::size_t j = 2; j < 6; ++j) noise += importance[j];
    CHECK(informative > 10.0 * noise);
}

TEST_CASE("nested JSON round-trips trees exactly") {
    Dataset data = synth_generate({150, 4, 2, 2.0, 0.1, 13});
    ForestConfig config;
    config.n_trees = 5;
    ForestClassifier model(config);
    model.fit(data, 21);

    ForestClassifier reloaded(config);
    reloaded.load_params(model.params_json());
    Dataset probe = synth_generate({60, 4, 2, 2.0, 0.1, 14});
    CHECK(model.predict_scores(probe.rows) == reloaded.predict_scores(probe.rows));
}

}  // TEST_SUITE
