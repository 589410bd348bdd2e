#include "malbench/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "malbench/error.hpp"
#include "malbench/kernels.hpp"
#include "malbench/rng.hpp"
#include "malbench/version.hpp"

namespace malbench {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class F>
auto pipeline_stage(const char* stage, F&& fn) {
    try {
        return fn();
    } catch (Error& e) {
        throw Error(e.kind(), std::string("[stage ") + stage + "] " + e.what());
    }
}

std::map<std::string, double> metric_fields(const EvalReport& r) {
    return {{"accuracy", r.accuracy}, {"precision", r.precision},
            {"recall", r.recall},     {"f1", r.f1},
            {"auc", r.auc},           {"mcc", r.mcc},
            {"kappa", r.kappa},       {"train_time_seconds", r.train_time_seconds}};
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
    return buf;
}

}  // namespace

nlohmann::json ModelSpec::to_json() const {
    return {{"model_id", model_id}, {"family", family}, {"config", config}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    ModelSpec s;
    s.model_id = j.at("model_id").get<std::string>();
    s.family = j.at("family").get<std::string>();
    s.config = j.value("config", nlohmann::json());
    return s;
}

nlohmann::json DataSource::to_json() const {
    if (synth.has_value()) return {{"synth", synth->to_json()}};
    nlohmann::json j = {{"csv", csv.has_value() ? csv->string() : ""},
                        {"label_column", label_column},
                        {"positive_label", positive_label}};
    if (schema.has_value()) j["schema"] = schema->to_json();
    return j;
}

DataSource DataSource::from_json(const nlohmann::json& j) {
    DataSource s;
    if (j.contains("synth")) {
        s.synth = SynthSpec::from_json(j.at("synth"));
        return s;
    }
    if (!j.contains("csv")) fail(ErrorKind::invalid_plan, "dataset needs 'csv' or 'synth'");
    s.csv = std::filesystem::path(j.at("csv").get<std::string>());
    s.label_column = j.value("label_column", s.label_column);
    s.positive_label = j.value("positive_label", s.positive_label);
    if (j.contains("schema")) s.schema = FeatureSchema::from_json(j.at("schema"));
    return s;
}

void BenchmarkPlan::validate() const {
    if (roster.empty()) fail(ErrorKind::invalid_plan, "empty model roster");
    if (cv_folds < 2) fail(ErrorKind::invalid_plan, "cv_folds must be >= 2");
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
        fail(ErrorKind::invalid_plan, "split ratio outside (0,1)");
    std::set<std::string> ids;
    for (const auto& m : roster)
        if (!ids.insert(m.model_id).second)
            fail(ErrorKind::invalid_plan, "duplicate model_id: " + m.model_id);
    if (!dataset.csv.has_value() && !dataset.synth.has_value())
        fail(ErrorKind::invalid_plan, "plan has no dataset source");
}

nlohmann::json BenchmarkPlan::to_json() const {
    nlohmann::json roster_json = nlohmann::json::array();
    for (const auto& m : roster) roster_json.push_back(m.to_json());
    nlohmann::json j = {{"dataset", dataset.to_json()},
                        {"z_threshold", z_threshold},
                        {"rfe_k", rfe_k},
                        {"rfe_step", rfe_step},
                        {"rfe_estimator", rfe_estimator_id},
                        {"split",
                         {{"ratio", split_ratio}, {"stratified", stratified}}},
                        {"cv_folds", cv_folds},
                        {"roster", roster_json},
                        {"master_seed", master_seed}};
    if (split_seed.has_value()) j["split"]["seed"] = *split_seed;
    return j;
}

BenchmarkPlan BenchmarkPlan::from_json(const nlohmann::json& j) {
    BenchmarkPlan p;
    p.dataset = DataSource::from_json(j.at("dataset"));
    p.z_threshold = j.value("z_threshold", p.z_threshold);
    p.rfe_k = j.value("rfe_k", p.rfe_k);
    p.rfe_step = j.value("rfe_step", p.rfe_step);
    p.rfe_estimator_id = j.value("rfe_estimator", p.rfe_estimator_id);
    if (j.contains("split")) {
        const auto& s = j.at("split");
        p.split_ratio = s.value("ratio", p.split_ratio);
        p.stratified = s.value("stratified", p.stratified);
        if (s.contains("seed")) p.split_seed = s.at("seed").get<std::uint64_t>();
    }
    p.cv_folds = j.value("cv_folds", p.cv_folds);
    for (const auto& m : j.at("roster")) p.roster.push_back(ModelSpec::from_json(m));
    p.master_seed = j.value("master_seed", p.master_seed);
    p.validate();
    return p;
}

nlohmann::json CvResult::to_json() const {
    nlohmann::json folds_json = nlohmann::json::array();
    for (const auto& f : folds) folds_json.push_back(f.to_json());
    nlohmann::json agg;
    for (const auto& [name, a] : aggregates)
        agg[name] = {{"mean", a.mean}, {"std", a.stddev}};
    return {{"folds", folds_json}, {"aggregates", agg}};
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels,
                                                       std::size_t k, std::uint64_t seed) {
    if (k < 2) fail(ErrorKind::invalid_spec, "k-fold needs k >= 2");
    if (k > labels.size()) fail(ErrorKind::fold_too_small, "more folds than rows");

    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            fail(ErrorKind::non_binary_value, "fold labels must be in {0,1}");
        by_class[labels[i]].push_back(i);
    }

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    for (int c = 0; c < 2; ++c) {
        rng.shuffle(by_class[c]);
        const std::size_t n_c = by_class[c].size();
        const std::size_t base = n_c / k;
        const std::size_t extra = n_c % k;
        std::size_t at = 0;
        for (std::size_t f = 0; f < k; ++f) {
            std::size_t take = base + (f < extra ? 1 : 0);
            for (std::size_t i = 0; i < take; ++i) folds[f].push_back(by_class[c][at++]);
        }
    }
    return folds;
}

CvResult kfold_cv(const Dataset& train, Classifier& model, std::size_t k, std::uint64_t seed,
                  const std::string& model_id) {
    std::vector<std::size_t> counts(2, 0);
    for (int l : train.labels) counts[static_cast<std::size_t>(l)]++;
    for (int c = 0; c < 2; ++c)
        if (counts[static_cast<std::size_t>(c)] < k)
            fail(ErrorKind::fold_too_small,
                 "class " + std::to_string(c) + " has fewer rows than folds");

    std::vector<std::vector<std::size_t>> fold_of = stratified_folds(train.labels, k, seed);

    const std::string id = model_id.empty() ? model.family() : model_id;
    CvResult result;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> test_idx = fold_of[f];
        std::vector<std::size_t> train_idx;
        for (std::size_t g = 0; g < k; ++g)
            if (g != f) train_idx.insert(train_idx.end(), fold_of[g].begin(), fold_of[g].end());
        std::sort(test_idx.begin(), test_idx.end());
        std::sort(train_idx.begin(), train_idx.end());

        Dataset fold_train = dataset_subset(train, train_idx);
        Dataset fold_test = dataset_subset(train, test_idx);
        auto [std_train, std_test, scaler] = standardize(fold_train, fold_test);

        const auto start = std::chrono::steady_clock::now();
        model.fit(std_train, derive_seed(seed, f));
        const double elapsed = seconds_since(start);

        std::vector<double> scores = model.predict_scores(std_test.rows);
        result.folds.push_back(evaluate(id, std_test.labels, scores,
                                        model.decision_threshold(), elapsed));
    }

    for (const char* name : {"accuracy", "precision", "recall", "f1", "auc", "mcc", "kappa",
                             "train_time_seconds"}) {
        double sum = 0.0;
        for (const auto& fold : result.folds) sum += metric_fields(fold).at(name);
        const double mean = sum / static_cast<double>(k);
        double sq = 0.0;
        for (const auto& fold : result.folds) {
            const double d = metric_fields(fold).at(name) - mean;
            sq += d * d;
        }
        result.aggregates[name] = {mean, std::sqrt(sq / static_cast<double>(k))};
    }
    return result;
}

nlohmann::json EnvironmentStamp::to_json() const {
    return {{"artifact_version", artifact_version},
            {"thread_count", thread_count},
            {"clock", clock},
            {"kernel_backend", kernel_backend}};
}

nlohmann::json BenchmarkReport::to_json() const {
    nlohmann::json models_json = nlohmann::json::array();
    for (const auto& m : models) {
        nlohmann::json mj = {{"model_id", m.spec.model_id},
                             {"family", m.spec.family},
                             {"config", m.spec.config},
                             {"cv", m.cv.to_json()},
                             {"test", m.test.to_json()},
                             {"train_accuracy", m.train_accuracy},
                             {"train_time_seconds", m.train_time_seconds}};
        mj["trace"] = m.trace.has_value() ? m.trace->to_json() : nlohmann::json();
        models_json.push_back(std::move(mj));
    }
    return {{"plan", plan.to_json()},
            {"environment", environment.to_json()},
            {"preprocess", preprocess.to_json()},
            {"rfe", rfe.has_value() ? rfe->to_json() : nlohmann::json()},
            {"models", models_json},
            {"notes",
             {{"cv_protocol",
               "cross-validation runs on the training split only; the held-out test set is "
               "never touched before the final evaluation"},
              {"standardization", "statistics fitted on the training rows of each fold/split"}}}};
}

BenchmarkReport run_benchmark(const BenchmarkPlan& plan) {
    plan.validate();

    Dataset raw = pipeline_stage("load", [&] {
        if (plan.dataset.synth.has_value()) return synth_generate(*plan.dataset.synth);
        FeatureSchema schema =
            plan.dataset.schema.has_value()
                ? *plan.dataset.schema
                : infer_schema(*plan.dataset.csv, plan.dataset.label_column,
                               plan.dataset.positive_label);
        return load_csv(*plan.dataset.csv, schema);
    });

    BenchmarkReport report;
    report.plan = plan;
    report.environment = {kVersion, 1, "steady_clock",
                          kern::backend_name(kern::active_backend())};

    Dataset filtered = pipeline_stage("zscore_filter", [&] {
        auto [kept, prep] = zscore_filter(raw, plan.z_threshold);
        report.preprocess = std::move(prep);
        return std::move(kept);
    });

    const std::uint64_t split_seed =
        plan.split_seed.value_or(derive_seed(plan.master_seed, "split"));
    Split parts = pipeline_stage("split", [&] {
        return split(filtered, plan.split_ratio, split_seed, plan.stratified);
    });

    Dataset train = std::move(parts.train);
    Dataset test = std::move(parts.test);

    if (plan.rfe_k > 0) {
        pipeline_stage("rfe", [&] {
            RfeEstimatorConfig est;
            est.id = plan.rfe_estimator_id;
            est.seed = derive_seed(plan.master_seed, "rfe");
            RfeResult selection = rfe(train, plan.rfe_k, est, plan.rfe_step);
            train = apply_selection(train, selection);
            test = apply_selection(test, selection);
            report.rfe = std::move(selection);
            return 0;
        });
    }

    for (const auto& spec : plan.roster) {
        pipeline_stage(("model " + spec.model_id).c_str(), [&] {
            std::unique_ptr<Classifier> model = make_classifier(spec.family, spec.config);
            const std::uint64_t model_seed = derive_seed(plan.master_seed, spec.model_id);

            ModelOutcome outcome;
            outcome.spec = spec;
            outcome.spec.config = model->config_json();  // echo resolved config
            outcome.cv = kfold_cv(train, *model, plan.cv_folds, model_seed, spec.model_id);

            auto [std_train, std_test, scaler] = standardize(train, test);
            const auto start = std::chrono::steady_clock::now();
            model->fit(std_train, derive_seed(model_seed, "final"));
            outcome.train_time_seconds = seconds_since(start);

            std::vector<double> test_scores = model->predict_scores(std_test.rows);
            outcome.test = evaluate(spec.model_id, std_test.labels, test_scores,
                                    model->decision_threshold(), outcome.train_time_seconds);

            std::vector<int> train_predictions = model->predict_labels(std_train.rows);
            std::size_t correct = 0;
            for (std::size_t i = 0; i < train_predictions.size(); ++i)
                correct += static_cast<std::size_t>(train_predictions[i] == std_train.labels[i]);
            outcome.train_accuracy =
                static_cast<double>(correct) / static_cast<double>(std_train.n_rows());

            if (auto* net = dynamic_cast<NetClassifier*>(model.get()))
                outcome.trace = net->trace();

            report.models.push_back(std::move(outcome));
            return 0;
        });
    }
    return report;
}

void strip_timing(nlohmann::json& j) {
    if (j.is_object()) {
        for (auto& [key, value] : j.items()) {
            if (key == "train_time_seconds") {
                if (value.is_number()) {
                    value = 0.0;
                } else if (value.is_object()) {  // aggregate {mean, std}
                    value["mean"] = 0.0;
                    value["std"] = 0.0;
                }
            } else {
                strip_timing(value);
            }
        }
    } else if (j.is_array()) {
        for (auto& item : j) strip_timing(item);
    }
}

std::string render_json(const BenchmarkReport& report, bool include_timing) {
    nlohmann::json j = report.to_json();
    if (!include_timing) strip_timing(j);
    return j.dump(2) + "\n";
}

std::string render_markdown(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "# Benchmark report\n\n";
    out << "- dataset rows in: " << report.preprocess.rows_in
        << ", removed by z-filter: " << report.preprocess.rows_removed << "\n";
    out << "- kernel backend: " << report.environment.kernel_backend << "\n";
    if (report.rfe.has_value())
        out << "- features selected: " << report.rfe->selected.size() << " ("
            << report.rfe->estimator_id << " estimator)\n";
    out << "\n## Model accuracies and training time\n\n";
    out << "| Model | Train Accuracy (%) | CV Accuracy (%) | Train Time (s) |\n";
    out << "|---|---|---|---|\n";
    for (const auto& m : report.models) {
        char t[32];
        std::snprintf(t, sizeof(t), "%.3f", m.train_time_seconds);
        out << "| " << m.spec.model_id << " | " << percent(m.train_accuracy) << " | "
            << percent(m.cv.aggregates.at("accuracy").mean) << " | " << t << " |\n";
    }
    out << "\n## Test performance\n\n";
    out << "| Model | Test Accuracy (%) | AUC (%) |\n";
    out << "|---|---|---|\n";
    for (const auto& m : report.models)
        out << "| " << m.spec.model_id << " | " << percent(m.test.accuracy) << " | "
            << percent(m.test.auc) << " |\n";
    out << "\n## MCC and Kappa\n\n";
    out << "| Model | MCC (%) | Kappa (%) |\n";
    out << "|---|---|---|\n";
    for (const auto& m : report.models)
        out << "| " << m.spec.model_id << " | " << percent(m.test.mcc) << " | "
            << percent(m.test.kappa) << " |\n";
    return out.str();
}

void write_csv_bundle(const BenchmarkReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io_error, "cannot create " + dir.string());
    for (const auto& m : report.models) {
        std::ofstream roc(dir / ("roc_" + m.spec.model_id + ".csv"));
        if (!roc) fail(ErrorKind::io_error, "cannot write roc csv for " + m.spec.model_id);
        m.test.roc.write_csv(roc);
        if (m.trace.has_value()) {
            std::ofstream trace(dir / ("trace_" + m.spec.model_id + ".csv"));
            if (!trace) fail(ErrorKind::io_error, "cannot write trace csv for " + m.spec.model_id);
            m.trace->write_csv(trace);
        }
    }
}

}  // namespace malbench
