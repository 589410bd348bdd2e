#include "malbench/linear.hpp"

#include <cmath>

#include "malbench/error.hpp"
#include "malbench/kernels.hpp"
#include "malbench/rng.hpp"

namespace malbench {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kProbClamp = 1e-12;

double clamped_log(double p) {
    if (p < kProbClamp) p = kProbClamp;
    if (p > 1.0 - kProbClamp) p = 1.0 - kProbClamp;
    return std::log(p);
}

}  // namespace

void LogRegConfig::validate() const {
    if (learning_rate <= 0.0) fail(ErrorKind::invalid_spec, "learning_rate must be positive");
    if (l2 < 0.0) fail(ErrorKind::invalid_spec, "l2 must be non-negative");
}

nlohmann::json LogRegConfig::to_json() const {
    return {{"learning_rate", learning_rate}, {"epochs", epochs}, {"l2", l2}};
}

LogRegConfig LogRegConfig::from_json(const nlohmann::json& j) {
    LogRegConfig c;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.l2 = j.value("l2", c.l2);
    c.validate();
    return c;
}

double logreg_loss(std::span<const double> weights, double bias, const Matrix& x,
                   std::span<const int> y, double l2) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = sigmoid(kern::dot(weights.data(), x.row(i), d) + bias);
        loss -= y[i] == 1 ? clamped_log(p) : clamped_log(1.0 - p);
    }
    loss /= static_cast<double>(n);
    loss += 0.5 * l2 * kern::dot(weights.data(), weights.data(), d);
    return loss;
}

void logreg_gradient(std::span<const double> weights, double bias, const Matrix& x,
                     std::span<const int> y, double l2, std::span<double> grad_w,
                     double& grad_b) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = sigmoid(kern::dot(weights.data(), x.row(i), d) + bias);
        double residual = p - static_cast<double>(y[i]);
        kern::axpy(residual, x.row(i), grad_w.data(), d);
        grad_b += residual;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& g : grad_w) g *= inv_n;
    grad_b *= inv_n;
    kern::axpy(l2, weights.data(), grad_w.data(), d);
}

void LogRegClassifier::fit(const Dataset& train, std::uint64_t /*seed*/) {
    if (train.n_rows() == 0) fail(ErrorKind::empty_dataset, "logreg fit on empty dataset");
    const std::size_t d = train.n_features();
    weights_.assign(d, 0.0);
    bias_ = 0.0;
    loss_history_.clear();

    double rate = config_.learning_rate;
    double prev_loss = logreg_loss(weights_, bias_, train.rows, train.labels, config_.l2);
    loss_history_.push_back(prev_loss);

    std::vector<double> grad_w(d);
    std::vector<double> saved_w(d);
    double grad_b = 0.0;

    for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
        saved_w = weights_;
        const double saved_b = bias_;
        double loss = prev_loss;
        for (;;) {
            logreg_gradient(saved_w, saved_b, train.rows, train.labels, config_.l2, grad_w,
                            grad_b);
            for (std::size_t j = 0; j < d; ++j) weights_[j] = saved_w[j] - rate * grad_w[j];
            bias_ = saved_b - rate * grad_b;
            loss = logreg_loss(weights_, bias_, train.rows, train.labels, config_.l2);
            if (!std::isfinite(loss))
                fail(ErrorKind::non_finite_loss,
                     "logistic regression diverged; is the input standardized?");
            if (loss <= prev_loss + 1e-9) break;
            rate *= 0.5;
            if (rate < 1e-18) {  // flat to machine precision; keep the previous point
                weights_ = saved_w;
                bias_ = saved_b;
                loss = prev_loss;
                break;
            }
        }
        prev_loss = loss;
        loss_history_.push_back(loss);
    }
    fitted_ = true;
}

std::vector<double> LogRegClassifier::predict_scores(const Matrix& rows) const {
    if (!fitted_) fail(ErrorKind::invalid_spec, "predict before fit");
    if (rows.cols() != weights_.size())
        fail(ErrorKind::shape_mismatch, "feature width does not match the fitted model");
    std::vector<double> scores(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i)
        scores[i] = sigmoid(kern::dot(weights_.data(), rows.row(i), weights_.size()) + bias_);
    return scores;
}

nlohmann::json LogRegClassifier::params_json() const {
    return {{"weights", weights_}, {"bias", bias_}};
}

void LogRegClassifier::load_params(const nlohmann::json& params) {
    weights_ = params.at("weights").get<std::vector<double>>();
    bias_ = params.at("bias").get<double>();
    fitted_ = true;
}

void LinearSvmConfig::validate() const {
    if (lambda <= 0.0) fail(ErrorKind::invalid_spec, "lambda must be positive");
}

nlohmann::json LinearSvmConfig::to_json() const {
    return {{"lambda", lambda}, {"epochs", epochs}};
}

LinearSvmConfig LinearSvmConfig::from_json(const nlohmann::json& j) {
    LinearSvmConfig c;
    c.lambda = j.value("lambda", c.lambda);
    c.epochs = j.value("epochs", c.epochs);
    c.validate();
    return c;
}

double svm_objective(std::span<const double> weights, double bias, const Matrix& x,
                     std::span<const int> y, double lambda) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    double hinge_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double label = y[i] == 1 ? 1.0 : -1.0;
        double margin = label * (kern::dot(weights.data(), x.row(i), d) + bias);
        if (margin < 1.0) hinge_sum += 1.0 - margin;
    }
    return 0.5 * lambda * kern::dot(weights.data(), weights.data(), d) +
           hinge_sum / static_cast<double>(n);
}

void svm_subgradient(std::span<const double> weights, double bias, const Matrix& x,
                     std::span<const int> y, double lambda, std::span<double> grad_w,
                     double& grad_b) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double label = y[i] == 1 ? 1.0 : -1.0;
        double margin = label * (kern::dot(weights.data(), x.row(i), d) + bias);
        if (margin < 1.0) {
            kern::axpy(-label, x.row(i), grad_w.data(), d);
            grad_b -= label;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& g : grad_w) g *= inv_n;
    grad_b *= inv_n;
    kern::axpy(lambda, weights.data(), grad_w.data(), d);
}

void LinearSvmClassifier::fit(const Dataset& train, std::uint64_t seed) {
    if (train.n_rows() == 0) fail(ErrorKind::empty_dataset, "svm fit on empty dataset");
    const std::size_t n = train.n_rows();
    const std::size_t d = train.n_features();
    weights_.assign(d, 0.0);
    bias_ = 0.0;

    Rng rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t idx : order) {
            ++t;
            const double eta = 1.0 / (config_.lambda * static_cast<double>(t));
            const double label = train.labels[idx] == 1 ? 1.0 : -1.0;
            const double margin =
                label * (kern::dot(weights_.data(), train.rows.row(idx), d) + bias_);
            const double shrink = 1.0 - eta * config_.lambda;
            for (double& w : weights_) w *= shrink;
            if (margin < 1.0) {
                kern::axpy(eta * label, train.rows.row(idx), weights_.data(), d);
                bias_ += eta * label;
            }
        }
        double objective = svm_objective(weights_, bias_, train.rows, train.labels,
                                         config_.lambda);
        if (!std::isfinite(objective))
            fail(ErrorKind::non_finite_loss, "svm objective diverged");
    }
    fitted_ = true;
}

std::vector<double> LinearSvmClassifier::predict_scores(const Matrix& rows) const {
    if (!fitted_) fail(ErrorKind::invalid_spec, "predict before fit");
    if (rows.cols() != weights_.size())
        fail(ErrorKind::shape_mismatch, "feature width does not match the fitted model");
    std::vector<double> scores(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i)
        scores[i] = kern::dot(weights_.data(), rows.row(i), weights_.size()) + bias_;
    return scores;
}

nlohmann::json LinearSvmClassifier::params_json() const {
    return {{"weights", weights_}, {"bias", bias_}};
}

void LinearSvmClassifier::load_params(const nlohmann::json& params) {
    weights_ = params.at("weights").get<std::vector<double>>();
    bias_ = params.at("bias").get<double>();
    fitted_ = true;
}

}  // namespace malbench
