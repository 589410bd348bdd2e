#pragma once

#include <optional>

#include "malbench/classifier.hpp"
#include "malbench/metrics.hpp"
#include "malbench/net.hpp"
#include "malbench/selection.hpp"

namespace malbench {

struct ModelSpec {
    std::string model_id;
    std::string family;
    nlohmann::json config;  // family config; null selects defaults

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);
};

struct DataSource {
    // exactly one of csv / synth
    std::optional<std::filesystem::path> csv;
    std::string label_column = "classification";
    std::string positive_label = "malware";
    std::optional<FeatureSchema> schema;  // absent: inferred from the file
    std::optional<SynthSpec> synth;

    nlohmann::json to_json() const;
    static DataSource from_json(const nlohmann::json& j);
};

struct BenchmarkPlan {
    DataSource dataset;
    double z_threshold = 3.0;
    std::size_t rfe_k = 0;  // 0 disables feature selection
    std::size_t rfe_step = 1;
    std::string rfe_estimator_id = "logreg";
    double split_ratio = 0.8;
    std::optional<std::uint64_t> split_seed;  // default: derived from master_seed
    bool stratified = true;
    std::size_t cv_folds = 10;
    std::vector<ModelSpec> roster;
    std::uint64_t master_seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static BenchmarkPlan from_json(const nlohmann::json& j);
};

struct CvAggregate {
    double mean = 0.0;
    double stddev = 0.0;  // population std over folds
};

struct CvResult {
    std::vector<EvalReport> folds;
    std::map<std::string, CvAggregate> aggregates;

    nlohmann::json to_json() const;
};

// Stratified fold assignment: shuffles within each class and deals out k
// slices whose sizes differ by at most one row per class. Returns local row
// indices per fold; folds are disjoint and cover [0, labels.size()).
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels,
                                                       std::size_t k, std::uint64_t seed);

// Stratified, seeded k-fold cross-validation. Each fold standardizes on its
// k-1 training folds, refits the model with a fold-derived seed, and
// evaluates on the held-out fold. Requires at least k rows of each class so
// every fold sees both classes.
CvResult kfold_cv(const Dataset& train, Classifier& model, std::size_t k, std::uint64_t seed,
                  const std::string& model_id = "");

struct ModelOutcome {
    ModelSpec spec;
    CvResult cv;
    EvalReport test;
    double train_accuracy = 0.0;      // final model, training-set accuracy
    double train_time_seconds = 0.0;  // final fit, monotonic clock
    std::optional<TrainTrace> trace;  // neural families only
};

struct EnvironmentStamp {
    std::string artifact_version;
    int thread_count = 1;
    std::string clock = "steady_clock";
    std::string kernel_backend;

    nlohmann::json to_json() const;
};

struct BenchmarkReport {
    BenchmarkPlan plan;
    PreprocessReport preprocess;
    std::optional<RfeResult> rfe;
    std::vector<ModelOutcome> models;
    EnvironmentStamp environment;

    nlohmann::json to_json() const;
};

// Full pipeline in order: load/synth -> z-filter on the full data -> split ->
// RFE on the training portion -> per roster model, CV on the training split
// plus a timed final fit evaluated on the held-out test set.
BenchmarkReport run_benchmark(const BenchmarkPlan& plan);

// Canonical JSON rendering. include_timing=false zeroes every wall-clock
// field (train_time_seconds everywhere), which is the form the determinism
// tests compare byte-for-byte: timing is the one physically nonreproducible
// part of a run.
std::string render_json(const BenchmarkReport& report, bool include_timing = true);

// Zeroes wall-clock fields in an already-rendered report document.
void strip_timing(nlohmann::json& j);

std::string render_markdown(const BenchmarkReport& report);

// Writes roc_<model_id>.csv per model and trace_<model_id>.csv per neural
// model into the directory (created if missing).
void write_csv_bundle(const BenchmarkReport& report, const std::filesystem::path& dir);

}  // namespace malbench
