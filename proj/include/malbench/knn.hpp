#pragma once

#include "malbench/classifier.hpp"

namespace malbench {

struct KnnConfig {
    std::size_t k = 5;  // odd by default to limit voting ties

    void validate() const;
    nlohmann::json to_json() const;
    static KnnConfig from_json(const nlohmann::json& j);
};

// Brute-force Euclidean k-nearest neighbors. Score is the fraction of the k
// nearest training rows labeled 1; distance ties break toward the lower
// training-row index, and a score tie at exactly 0.5 resolves to label 1.
class KnnClassifier final : public Classifier {
public:
    explicit KnnClassifier(KnnConfig config = {}) : config_(config) { config_.validate(); }

    const char* family() const override { return "knn"; }
    void fit(const Dataset& train, std::uint64_t seed) override;
    bool is_fitted() const override { return fitted_; }
    std::vector<double> predict_scores(const Matrix& rows) const override;
    double decision_threshold() const override { return 0.5; }
    nlohmann::json config_json() const override { return config_.to_json(); }
    nlohmann::json params_json() const override;
    void load_params(const nlohmann::json& params) override;

private:
    KnnConfig config_;
    Matrix train_rows_;
    std::vector<int> train_labels_;
    bool fitted_ = false;
};

}  // namespace malbench
