#pragma once

#include "malbench/classifier.hpp"

namespace malbench {

enum class FeatureSampling { sqrt_features, all_features };

struct TreeConfig {
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_split = 2;
    FeatureSampling features_per_split = FeatureSampling::sqrt_features;

    void validate() const;
    nlohmann::json to_json() const;
    static TreeConfig from_json(const nlohmann::json& j);
};

struct ForestConfig {
    std::size_t n_trees = 100;
    TreeConfig tree;
    bool bootstrap = true;

    void validate() const;
    nlohmann::json to_json() const;
    static ForestConfig from_json(const nlohmann::json& j);
};

// CART: greedy best split by Gini impurity decrease over the midpoints of
// sorted distinct values, on a per-node random feature subset. Leaves
// predict their positive fraction.
struct DecisionTree {
    struct Node {
        bool leaf = true;
        double leaf_score = 0.0;
        std::size_t feature = 0;
        double threshold = 0.0;
        std::size_t left = 0;   // index into nodes
        std::size_t right = 0;
    };

    std::vector<Node> nodes;

    double predict(const double* row) const;
    nlohmann::json to_json() const;  // nested {feature, threshold, left, right | leaf_score}
    static DecisionTree from_json(const nlohmann::json& j);
};

// Fits one tree on the given sample indices (repeats allowed for bootstrap
// draws). importance_out, when non-null, accumulates per-feature weighted
// impurity decrease normalized by the root sample count.
DecisionTree fit_tree(const Matrix& x, std::span<const int> y,
                      std::span<const std::size_t> sample_indices, const TreeConfig& config,
                      std::uint64_t seed, std::vector<double>* importance_out = nullptr);

// Bagged trees; tree i derives its own seed from (seed, i), so a concurrent
// implementation would reproduce the sequential result exactly.
class ForestClassifier final : public Classifier {
public:
    explicit ForestClassifier(ForestConfig config = {}) : config_(config) { config_.validate(); }

    const char* family() const override { return "forest"; }
    void fit(const Dataset& train, std::uint64_t seed) override;
    bool is_fitted() const override { return fitted_; }
    std::vector<double> predict_scores(const Matrix& rows) const override;
    double decision_threshold() const override { return 0.5; }
    nlohmann::json config_json() const override { return config_.to_json(); }
    nlohmann::json params_json() const override;
    void load_params(const nlohmann::json& params) override;

    // Mean impurity-decrease importance across trees; used as the RFE
    // estimator signal.
    const std::vector<double>& feature_importance() const { return importance_; }
    const std::vector<DecisionTree>& trees() const { return trees_; }

private:
    ForestConfig config_;
    std::vector<DecisionTree> trees_;
    std::vector<double> importance_;
    bool fitted_ = false;
};

}  // namespace malbench
