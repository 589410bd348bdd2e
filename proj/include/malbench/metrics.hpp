#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace malbench {

// Positive class is malware = 1 in every metric here.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    nlohmann::json to_json() const { return {{"tp", tp}, {"fp", fp}, {"fn", fn}, {"tn", tn}}; }
    static ConfusionMatrix from_json(const nlohmann::json& j) {
        return {j.at("tp"), j.at("fp"), j.at("fn"), j.at("tn")};
    }
};

ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predictions);

// Zero-denominator cases resolve to 0 with the metric name recorded in
// `degenerate`, never to NaN.
struct ScalarMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<std::string> degenerate;
};

ScalarMetrics scalar_metrics(const ConfusionMatrix& cm);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

// Threshold sweep over distinct score values, descending; tied scores
// collapse into one point. Trapezoidal AUC equals the tie-corrected pairwise
// concordance probability by construction.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;

    nlohmann::json to_json() const;
    static RocCurve from_json(const nlohmann::json& j);
    void write_csv(std::ostream& out) const;
};

RocCurve roc_auc(std::span<const int> labels, std::span<const double> scores);

struct MetricValue {
    double value = 0.0;
    bool degenerate = false;
};

// Matthews correlation coefficient, computed in overflow-safe factored form.
MetricValue mcc(const ConfusionMatrix& cm);

// Cohen's kappa: (po - pe) / (1 - pe); pe = 1 resolves to 0 (degenerate).
MetricValue kappa(const ConfusionMatrix& cm);

struct EvalReport {
    std::string model_id;
    ConfusionMatrix cm;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
    double mcc = 0.0;
    double kappa = 0.0;
    RocCurve roc;
    double train_time_seconds = 0.0;
    std::vector<std::string> degenerate_metrics;

    nlohmann::json to_json() const;
    static EvalReport from_json(const nlohmann::json& j);
};

// Full evaluation of a scored test set: labels from thresholding the scores,
// then the complete metric block. Requires both classes present (for AUC).
EvalReport evaluate(const std::string& model_id, std::span<const int> labels,
                    std::span<const double> scores, double threshold,
                    double train_time_seconds = 0.0);

}  // namespace malbench
