#pragma once

#include <span>

#include "malbench/classifier.hpp"

namespace malbench {

struct LogRegConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 200;
    double l2 = 1e-4;

    void validate() const;
    nlohmann::json to_json() const;
    static LogRegConfig from_json(const nlohmann::json& j);
};

// L2-regularized binary cross-entropy over sigmoid(w.x + b); the bias is not
// regularized. Exposed for the finite-difference gradient tests.
double logreg_loss(std::span<const double> weights, double bias, const Matrix& x,
                   std::span<const int> y, double l2);
void logreg_gradient(std::span<const double> weights, double bias, const Matrix& x,
                     std::span<const int> y, double l2, std::span<double> grad_w,
                     double& grad_b);

// Full-batch gradient descent with a loss-monotonicity guard: an epoch whose
// loss rises beyond 1e-9 is rolled back and retried at half the step size.
class LogRegClassifier final : public Classifier {
public:
    explicit LogRegClassifier(LogRegConfig config = {}) : config_(config) { config_.validate(); }

    const char* family() const override { return "logreg"; }
    void fit(const Dataset& train, std::uint64_t seed) override;
    bool is_fitted() const override { return fitted_; }
    std::vector<double> predict_scores(const Matrix& rows) const override;
    double decision_threshold() const override { return 0.5; }
    nlohmann::json config_json() const override { return config_.to_json(); }
    nlohmann::json params_json() const override;
    void load_params(const nlohmann::json& params) override;

    std::span<const double> weights() const { return weights_; }
    double bias() const { return bias_; }
    const std::vector<double>& loss_history() const { return loss_history_; }

private:
    LogRegConfig config_;
    std::vector<double> weights_;
    double bias_ = 0.0;
    std::vector<double> loss_history_;
    bool fitted_ = false;
};

struct LinearSvmConfig {
    double lambda = 1e-4;
    std::size_t epochs = 100;

    void validate() const;
    nlohmann::json to_json() const;
    static LinearSvmConfig from_json(const nlohmann::json& j);
};

// Regularized hinge objective lambda/2 |w|^2 + mean hinge loss, with labels
// mapped to {-1,+1} internally. Exposed for the gradient tests, which probe
// only points where every margin differs from 1 (the objective is smooth
// there).
double svm_objective(std::span<const double> weights, double bias, const Matrix& x,
                     std::span<const int> y, double lambda);
void svm_subgradient(std::span<const double> weights, double bias, const Matrix& x,
                     std::span<const int> y, double lambda, std::span<double> grad_w,
                     double& grad_b);

// Pegasos-style per-example subgradient descent with step 1/(lambda * t);
// scores are uncalibrated margins, so the decision threshold is 0.
class LinearSvmClassifier final : public Classifier {
public:
    explicit LinearSvmClassifier(LinearSvmConfig config = {}) : config_(config) {
        config_.validate();
    }

    const char* family() const override { return "svm"; }
    void fit(const Dataset& train, std::uint64_t seed) override;
    bool is_fitted() const override { return fitted_; }
    std::vector<double> predict_scores(const Matrix& rows) const override;
    double decision_threshold() const override { return 0.0; }
    nlohmann::json config_json() const override { return config_.to_json(); }
    nlohmann::json params_json() const override;
    void load_params(const nlohmann::json& params) override;

    std::span<const double> weights() const { return weights_; }
    double bias() const { return bias_; }

private:
    LinearSvmConfig config_;
    std::vector<double> weights_;
    double bias_ = 0.0;
    bool fitted_ = false;
};

}  // namespace malbench
