#include "malbench/forest.hpp"

#include <algorithm>
#include <cmath>

#include "malbench/error.hpp"
#include "malbench/rng.hpp"

namespace malbench {

namespace {

double gini(std::size_t positives, std::size_t total) {
    if (total == 0) return 0.0;
    double p = static_cast<double>(positives) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

// Distinct feature indices, drawn without replacement in rng order.
std::vector<std::size_t> sample_features(std::size_t d, std::size_t count, Rng& rng) {
    std::vector<std::size_t> pool(d);
    for (std::size_t i = 0; i < d; ++i) pool[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(d - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

struct BuildItem {
    std::size_t node;
    std::size_t begin;
    std::size_t end;
    std::size_t depth;
};

}  // namespace

void TreeConfig::validate() const {
    if (min_samples_split < 2) fail(ErrorKind::invalid_spec, "min_samples_split must be >= 2");
}

nlohmann::json TreeConfig::to_json() const {
    return {{"max_depth", max_depth},
            {"min_samples_split", min_samples_split},
            {"features_per_split",
             features_per_split == FeatureSampling::sqrt_features ? "sqrt" : "all"}};
}

TreeConfig TreeConfig::from_json(const nlohmann::json& j) {
    TreeConfig c;
    c.max_depth = j.value("max_depth", c.max_depth);
    c.min_samples_split = j.value("min_samples_split", c.min_samples_split);
    std::string mode = j.value("features_per_split", "sqrt");
    if (mode == "sqrt")
        c.features_per_split = FeatureSampling::sqrt_features;
    else if (mode == "all")
        c.features_per_split = FeatureSampling::all_features;
    else
        fail(ErrorKind::parse_error, "unknown features_per_split mode: " + mode);
    c.validate();
    return c;
}

void ForestConfig::validate() const {
    if (n_trees < 1) fail(ErrorKind::invalid_spec, "n_trees must be >= 1");
    tree.validate();
}

nlohmann::json ForestConfig::to_json() const {
    nlohmann::json j = tree.to_json();
    j["n_trees"] = n_trees;
    j["bootstrap"] = bootstrap;
    return j;
}

ForestConfig ForestConfig::from_json(const nlohmann::json& j) {
    ForestConfig c;
    c.tree = TreeConfig::from_json(j);
    c.n_trees = j.value("n_trees", c.n_trees);
    c.bootstrap = j.value("bootstrap", c.bootstrap);
    c.validate();
    return c;
}

double DecisionTree::predict(const double* row) const {
    std::size_t at = 0;
    while (!nodes[at].leaf)
        at = row[nodes[at].feature] < nodes[at].threshold ? nodes[at].left : nodes[at].right;
    return nodes[at].leaf_score;
}

nlohmann::json DecisionTree::to_json() const {
    // nested records, built bottom-up over the flat node array
    std::vector<nlohmann::json> rendered(nodes.size());
    for (std::size_t i = nodes.size(); i-- > 0;) {
        const Node& n = nodes[i];
        if (n.leaf) {
            rendered[i] = {{"leaf_score", n.leaf_score}};
        } else {
            rendered[i] = {{"feature", n.feature},
                           {"threshold", n.threshold},
                           {"left", rendered[n.left]},
                           {"right", rendered[n.right]}};
        }
    }
    return rendered.empty() ? nlohmann::json() : rendered[0];
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
    DecisionTree tree;
    // children always live at higher indices than their parent, matching the
    // order fit_tree produces
    auto build = [&tree](auto&& self, const nlohmann::json& node) -> std::size_t {
        std::size_t at = tree.nodes.size();
        tree.nodes.emplace_back();
        if (node.contains("leaf_score")) {
            tree.nodes[at].leaf = true;
            tree.nodes[at].leaf_score = node.at("leaf_score").get<double>();
        } else {
            tree.nodes[at].leaf = false;
            tree.nodes[at].feature = node.at("feature").get<std::size_t>();
            tree.nodes[at].threshold = node.at("threshold").get<double>();
            std::size_t left = self(self, node.at("left"));
            std::size_t right = self(self, node.at("right"));
            tree.nodes[at].left = left;
            tree.nodes[at].right = right;
        }
        return at;
    };
    build(build, j);
    return tree;
}

DecisionTree fit_tree(const Matrix& x, std::span<const int> y,
                      std::span<const std::size_t> sample_indices, const TreeConfig& config,
                      std::uint64_t seed, std::vector<double>* importance_out) {
    if (sample_indices.empty()) fail(ErrorKind::empty_dataset, "fit_tree with no samples");
    config.validate();
    const std::size_t d = x.cols();
    const std::size_t max_depth =
        config.max_depth == 0 ? static_cast<std::size_t>(-1) : config.max_depth;
    std::size_t m_try = d;
    if (config.features_per_split == FeatureSampling::sqrt_features)
        m_try = std::max<std::size_t>(1, static_cast<std::size_t>(
                                             std::floor(std::sqrt(static_cast<double>(d)))));

    Rng rng(seed);
    DecisionTree tree;
    std::vector<std::size_t> samples(sample_indices.begin(), sample_indices.end());
    const double root_count = static_cast<double>(samples.size());

    std::vector<BuildItem> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, 0, samples.size(), 0});

    std::vector<std::pair<double, int>> sorted;  // (value, label) within a node

    while (!stack.empty()) {
        BuildItem item = stack.back();
        stack.pop_back();
        const std::size_t count = item.end - item.begin;

        std::size_t positives = 0;
        for (std::size_t i = item.begin; i < item.end; ++i)
            positives += static_cast<std::size_t>(y[samples[i]]);

        DecisionTree::Node& node = tree.nodes[item.node];
        node.leaf_score = static_cast<double>(positives) / static_cast<double>(count);

        const bool pure = positives == 0 || positives == count;
        if (pure || count < config.min_samples_split || item.depth >= max_depth) continue;

        const double parent_gini = gini(positives, count);
        std::vector<std::size_t> candidates;
        if (config.features_per_split == FeatureSampling::all_features) {
            candidates.resize(d);
            for (std::size_t i = 0; i < d; ++i) candidates[i] = i;
        } else {
            candidates = sample_features(d, m_try, rng);
        }

        bool found = false;
        double best_decrease = -1.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;

        for (std::size_t f : candidates) {
            sorted.clear();
            sorted.reserve(count);
            for (std::size_t i = item.begin; i < item.end; ++i)
                sorted.emplace_back(x(samples[i], f), y[samples[i]]);
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (sorted.front().first == sorted.back().first) continue;  // constant feature

            std::size_t left_pos = 0;
            for (std::size_t i = 1; i < count; ++i) {
                left_pos += static_cast<std::size_t>(sorted[i - 1].second);
                if (sorted[i].first == sorted[i - 1].first) continue;
                const std::size_t left_n = i;
                const std::size_t right_n = count - i;
                const std::size_t right_pos = positives - left_pos;
                const double weighted =
                    (static_cast<double>(left_n) * gini(left_pos, left_n) +
                     static_cast<double>(right_n) * gini(right_pos, right_n)) /
                    static_cast<double>(count);
                const double decrease = parent_gini - weighted;
                if (decrease > best_decrease) {
                    best_decrease = decrease;
                    best_feature = f;
                    best_threshold = (sorted[i - 1].first + sorted[i].first) / 2.0;
                    found = true;
                }
            }
        }
        if (!found) continue;  // every candidate feature is constant here

        // partition samples in place: left = strictly below threshold
        std::size_t mid = item.begin;
        for (std::size_t i = item.begin; i < item.end; ++i) {
            if (x(samples[i], best_feature) < best_threshold) std::swap(samples[i], samples[mid++]);
        }

        if (importance_out != nullptr) {
            if (importance_out->size() != d) importance_out->assign(d, 0.0);
            (*importance_out)[best_feature] +=
                (static_cast<double>(count) / root_count) * best_decrease;
        }

        node.leaf = false;
        node.feature = best_feature;
        node.threshold = best_threshold;
        std::size_t left = tree.nodes.size();
        tree.nodes.emplace_back();
        std::size_t right = tree.nodes.size();
        tree.nodes.emplace_back();
        tree.nodes[item.node].left = left;
        tree.nodes[item.node].right = right;
        stack.push_back({right, mid, item.end, item.depth + 1});
        stack.push_back({left, item.begin, mid, item.depth + 1});
    }
    return tree;
}

void ForestClassifier::fit(const Dataset& train, std::uint64_t seed) {
    if (train.n_rows() == 0) fail(ErrorKind::empty_dataset, "forest fit on empty dataset");
    const std::size_t n = train.n_rows();
    trees_.clear();
    trees_.reserve(config_.n_trees);
    importance_.assign(train.n_features(), 0.0);

    std::vector<std::size_t> identity(n);
    for (std::size_t i = 0; i < n; ++i) identity[i] = i;

    for (std::size_t t = 0; t < config_.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(seed, t);
        std::vector<std::size_t> sample;
        if (config_.bootstrap) {
            Rng boot(derive_seed(tree_seed, "bootstrap"));
            sample.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                sample[i] = static_cast<std::size_t>(boot.below(n));
        }
        trees_.push_back(fit_tree(train.rows, train.labels,
                                  config_.bootstrap ? std::span<const std::size_t>(sample)
                                                    : std::span<const std::size_t>(identity),
                                  config_.tree, tree_seed, &importance_));
    }
    for (double& v : importance_) v /= static_cast<double>(config_.n_trees);
    fitted_ = true;
}

std::vector<double> ForestClassifier::predict_scores(const Matrix& rows) const {
    if (!fitted_) fail(ErrorKind::invalid_spec, "predict before fit");
    std::vector<double> scores(rows.rows(), 0.0);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        double total = 0.0;
        for (const auto& tree : trees_) total += tree.predict(rows.row(i));
        scores[i] = total / static_cast<double>(trees_.size());
    }
    return scores;
}

nlohmann::json ForestClassifier::params_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"trees", trees}, {"feature_importance", importance_}};
}

void ForestClassifier::load_params(const nlohmann::json& params) {
    trees_.clear();
    for (const auto& t : params.at("trees")) trees_.push_back(DecisionTree::from_json(t));
    importance_ = params.at("feature_importance").get<std::vector<double>>();
    if (trees_.empty()) fail(ErrorKind::parse_error, "forest parameters hold no trees");
    fitted_ = true;
}

}  // namespace malbench
