#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "malbench/dataset.hpp"
#include "malbench/preprocess.hpp"

namespace malbench {

// Shared contract behind the six model families. fit() is deterministic
// given (data, config, seed); prediction is a pure function of the fitted
// state, so a fitted classifier is safe to share across readers.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual const char* family() const = 0;

    // Expects standardized features (the pipeline standardizes upstream).
    virtual void fit(const Dataset& train, std::uint64_t seed) = 0;

    virtual bool is_fitted() const = 0;

    // Higher score = more malware-like. Probabilities for calibrated
    // families, raw margins for the linear SVM.
    virtual std::vector<double> predict_scores(const Matrix& rows) const = 0;

    // 0.5 on probability scores, 0 on margins.
    virtual double decision_threshold() const = 0;

    virtual nlohmann::json config_json() const = 0;
    virtual nlohmann::json params_json() const = 0;
    virtual void load_params(const nlohmann::json& params) = 0;

    // Thresholds predict_scores; the single source of truth for labels.
    std::vector<int> predict_labels(const Matrix& rows) const {
        std::vector<double> scores = predict_scores(rows);
        std::vector<int> labels(scores.size());
        const double t = decision_threshold();
        for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= t ? 1 : 0;
        return labels;
    }
};

// Families: logreg, knn, forest, svm, mlp, dnn. Config fields missing from
// the JSON fall back to the family defaults; null selects all defaults.
std::unique_ptr<Classifier> make_classifier(const std::string& family,
                                            const nlohmann::json& config);

const std::vector<std::string>& known_families();

// Model file: {family, config, scaler, parameters}. The scaler travels with
// the model so evaluation applies the same training-set transform.
void save_model(const Classifier& model, const Standardization* scaler,
                const FeatureSchema* schema, const std::filesystem::path& path);

struct LoadedModel {
    std::unique_ptr<Classifier> classifier;
    std::optional<Standardization> scaler;
};

LoadedModel load_model(const std::filesystem::path& path);

}  // namespace malbench
