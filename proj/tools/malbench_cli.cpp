// malbench command-line tool: synthesize data, preprocess, select features,
// train and evaluate single models, or run the full benchmark pipeline.
// Exit codes: 0 success, 2 input/schema error, 3 numeric failure.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "malbench/bench.hpp"
#include "malbench/classifier.hpp"
#include "malbench/error.hpp"
#include "malbench/kernels.hpp"
#include "malbench/net.hpp"
#include "malbench/version.hpp"

namespace {

using namespace malbench;

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io_error, "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse_error, path + ": " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io_error, "cannot write " + path);
    out << text;
    if (!out) fail(ErrorKind::io_error, "write failed for " + path);
}

struct SynthArgs {
    std::size_t rows = 1000, features = 10, informative = 5;
    double sep = 2.0, flip = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

struct PreprocessArgs {
    std::string in, label_col = "classification", positive_label = "malware";
    double z_thresh = 3.0;
    std::string report, out;
};

struct SelectArgs {
    std::string in, label_col = "classification", positive_label = "malware";
    std::size_t k = 25, step = 1;
    std::string estimator = "logreg";
    std::uint64_t seed = 0;
    std::string out;
};

struct TrainArgs {
    std::string model, config, train, label_col = "classification",
                positive_label = "malware";
    std::uint64_t seed = 0;
    std::string out, trace;
};

struct EvaluateArgs {
    std::string model, test, label_col = "classification", positive_label = "malware";
    std::string out, roc;
};

struct BenchArgs {
    std::string plan, out, markdown, csv_dir;
    bool strip = false;
};

int run_synth(const SynthArgs& a) {
    SynthSpec spec{a.rows, a.features, a.informative, a.sep, a.flip, a.seed};
    Dataset data = synth_generate(spec);
    save_csv(data, a.out);
    std::cout << "wrote " << data.n_rows() << " rows x " << data.n_features()
              << " features to " << a.out << "\n";
    return 0;
}

int run_preprocess(const PreprocessArgs& a) {
    FeatureSchema schema = infer_schema(a.in, a.label_col, a.positive_label);
    Dataset data = load_csv(a.in, schema);
    auto [clean, report] = zscore_filter(data, a.z_thresh);
    if (!a.out.empty()) save_csv(clean, a.out);
    if (!a.report.empty()) write_text_file(a.report, report.to_json().dump(2) + "\n");
    std::cout << "kept " << clean.n_rows() << " of " << report.rows_in << " rows (removed "
              << report.rows_removed << ")\n";
    return 0;
}

int run_select(const SelectArgs& a) {
    FeatureSchema schema = infer_schema(a.in, a.label_col, a.positive_label);
    Dataset data = load_csv(a.in, schema);
    RfeEstimatorConfig est;
    est.id = a.estimator;
    est.seed = a.seed;
    RfeResult result = rfe(data, a.k, est, a.step);
    write_text_file(a.out, result.to_json().dump(2) + "\n");
    std::cout << "selected " << result.selected.size() << " features -> " << a.out << "\n";
    return 0;
}

int run_train(const TrainArgs& a) {
    FeatureSchema schema = infer_schema(a.train, a.label_col, a.positive_label);
    Dataset data = load_csv(a.train, schema);
    nlohmann::json config = a.config.empty() ? nlohmann::json() : read_json_file(a.config);
    std::unique_ptr<Classifier> model = make_classifier(a.model, config);

    Standardization scaler = fit_standardization(data);
    Dataset standardized = data;
    scaler.apply(standardized.rows);
    model->fit(standardized, a.seed);
    save_model(*model, &scaler, &data.schema, a.out);

    if (!a.trace.empty()) {
        if (auto* net = dynamic_cast<NetClassifier*>(model.get())) {
            std::ofstream trace(a.trace);
            if (!trace) fail(ErrorKind::io_error, "cannot write " + a.trace);
            net->trace().write_csv(trace);
        } else {
            std::cerr << "note: --trace applies to mlp/dnn models only, skipped\n";
        }
    }
    std::cout << "trained " << a.model << " on " << data.n_rows() << " rows -> " << a.out
              << "\n";
    return 0;
}

int run_evaluate(const EvaluateArgs& a) {
    LoadedModel loaded = load_model(a.model);
    FeatureSchema schema = infer_schema(a.test, a.label_col, a.positive_label);
    Dataset data = load_csv(a.test, schema);
    if (loaded.scaler.has_value()) loaded.scaler->apply(data.rows);
    std::vector<double> scores = loaded.classifier->predict_scores(data.rows);
    EvalReport report = evaluate(loaded.classifier->family(), data.labels, scores,
                                 loaded.classifier->decision_threshold());
    write_text_file(a.out, report.to_json().dump(2) + "\n");
    if (!a.roc.empty()) {
        std::ofstream roc(a.roc);
        if (!roc) fail(ErrorKind::io_error, "cannot write " + a.roc);
        report.roc.write_csv(roc);
    }
    std::cout << "accuracy " << report.accuracy << ", auc " << report.auc << " -> " << a.out
              << "\n";
    return 0;
}

int run_bench(const BenchArgs& a) {
    BenchmarkPlan plan = BenchmarkPlan::from_json(read_json_file(a.plan));
    BenchmarkReport report = run_benchmark(plan);
    write_text_file(a.out, render_json(report, !a.strip));
    if (!a.markdown.empty()) write_text_file(a.markdown, render_markdown(report));
    if (!a.csv_dir.empty()) write_csv_bundle(report, a.csv_dir);
    std::cout << "benchmarked " << report.models.size() << " models -> " << a.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabular malware-classification benchmark toolkit"};
    app.set_version_flag("--version", malbench::kVersion);
    app.require_subcommand(1);

    std::string backend;
    app.add_option("--kernel-backend", backend, "force kernel backend (scalar|avx2)");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled CSV");
    synth->add_option("--rows", synth_args.rows, "number of rows")->required();
    synth->add_option("--features", synth_args.features, "number of feature columns")->required();
    synth->add_option("--informative", synth_args.informative, "informative feature count");
    synth->add_option("--sep", synth_args.sep, "class separation in units of std");
    synth->add_option("--flip", synth_args.flip, "label flip fraction in [0,1)");
    synth->add_option("--seed", synth_args.seed, "generator seed");
    synth->add_option("--out", synth_args.out, "output CSV path")->required();

    PreprocessArgs prep_args;
    auto* prep = app.add_subcommand("preprocess", "z-score outlier filtering");
    prep->add_option("--in", prep_args.in, "input CSV")->required();
    prep->add_option("--label-col", prep_args.label_col, "label column name");
    prep->add_option("--positive-label", prep_args.positive_label, "positive class value");
    prep->add_option("--z-thresh", prep_args.z_thresh, "|z| removal threshold");
    prep->add_option("--report", prep_args.report, "preprocess report JSON path");
    prep->add_option("--out", prep_args.out, "filtered CSV path");

    SelectArgs select_args;
    auto* select = app.add_subcommand("select", "recursive feature elimination");
    select->add_option("--in", select_args.in, "input CSV")->required();
    select->add_option("--label-col", select_args.label_col, "label column name");
    select->add_option("--positive-label", select_args.positive_label, "positive class value");
    select->add_option("--k", select_args.k, "features to keep");
    select->add_option("--step", select_args.step, "features dropped per round");
    select->add_option("--estimator", select_args.estimator, "logreg|forest");
    select->add_option("--seed", select_args.seed, "estimator seed");
    select->add_option("--out", select_args.out, "RFE result JSON path")->required();

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "fit one model (standardizes internally)");
    train->add_option("--model", train_args.model, "logreg|knn|forest|svm|mlp|dnn")->required();
    train->add_option("--config", train_args.config, "model config JSON path");
    train->add_option("--train", train_args.train, "training CSV")->required();
    train->add_option("--label-col", train_args.label_col, "label column name");
    train->add_option("--positive-label", train_args.positive_label, "positive class value");
    train->add_option("--seed", train_args.seed, "training seed");
    train->add_option("--out", train_args.out, "model JSON path")->required();
    train->add_option("--trace", train_args.trace, "training trace CSV (mlp/dnn)");

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "score a model on a test CSV");
    evaluate->add_option("--model", eval_args.model, "model JSON path")->required();
    evaluate->add_option("--test", eval_args.test, "test CSV")->required();
    evaluate->add_option("--label-col", eval_args.label_col, "label column name");
    evaluate->add_option("--positive-label", eval_args.positive_label, "positive class value");
    evaluate->add_option("--out", eval_args.out, "evaluation report JSON path")->required();
    evaluate->add_option("--roc", eval_args.roc, "ROC curve CSV path");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "run a full benchmark plan");
    bench->add_option("--plan", bench_args.plan, "plan JSON path")->required();
    bench->add_option("--out", bench_args.out, "report JSON path")->required();
    bench->add_option("--markdown", bench_args.markdown, "rendered tables path");
    bench->add_option("--csv-dir", bench_args.csv_dir, "directory for ROC/trace CSVs");
    bench->add_flag("--strip-timing", bench_args.strip,
                    "zero wall-clock fields for byte-reproducible output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!backend.empty()) {
            if (backend == "scalar")
                malbench::kern::set_backend(malbench::kern::Backend::scalar);
            else if (backend == "avx2")
                malbench::kern::set_backend(malbench::kern::Backend::avx2);
            else
                malbench::fail(malbench::ErrorKind::invalid_spec,
                               "unknown kernel backend: " + backend);
        }
        if (synth->parsed()) return run_synth(synth_args);
        if (prep->parsed()) return run_preprocess(prep_args);
        if (select->parsed()) return run_select(select_args);
        if (train->parsed()) return run_train(train_args);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (bench->parsed()) return run_bench(bench_args);
    } catch (const malbench::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
