#include <fstream>

#include "malbench/classifier.hpp"
#include "malbench/error.hpp"
#include "malbench/forest.hpp"
#include "malbench/knn.hpp"
#include "malbench/linear.hpp"
#include "malbench/net.hpp"

namespace malbench {

const std::vector<std::string>& known_families() {
    static const std::vector<std::string> families = {"logreg", "knn", "forest",
                                                      "svm",    "mlp", "dnn"};
    return families;
}

std::unique_ptr<Classifier> make_classifier(const std::string& family,
                                            const nlohmann::json& config) {
    const nlohmann::json cfg = config.is_null() ? nlohmann::json::object() : config;
    if (family == "logreg")
        return std::make_unique<LogRegClassifier>(LogRegConfig::from_json(cfg));
    if (family == "knn") return std::make_unique<KnnClassifier>(KnnConfig::from_json(cfg));
    if (family == "forest")
        return std::make_unique<ForestClassifier>(ForestConfig::from_json(cfg));
    if (family == "svm")
        return std::make_unique<LinearSvmClassifier>(LinearSvmConfig::from_json(cfg));
    if (family == "mlp" || family == "dnn") {
        NetConfig defaults = family == "mlp" ? NetConfig::mlp_defaults()
                                             : NetConfig::dnn_defaults();
        // explicit config fields override the family defaults
        nlohmann::json merged = defaults.to_json();
        merged.update(cfg);
        return std::make_unique<NetClassifier>(family, NetConfig::from_json(merged));
    }
    fail(ErrorKind::invalid_spec, "unknown model family: " + family);
}

void save_model(const Classifier& model, const Standardization* scaler,
                const FeatureSchema* schema, const std::filesystem::path& path) {
    if (!model.is_fitted()) fail(ErrorKind::invalid_spec, "saving an unfitted model");
    nlohmann::json doc = {{"family", model.family()},
                          {"config", model.config_json()},
                          {"parameters", model.params_json()}};
    if (scaler != nullptr && schema != nullptr)
        doc["scaler"] = scaler->to_json(*schema);
    else
        doc["scaler"] = nullptr;
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io_error, "cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse_error, "invalid model file: " + std::string(e.what()));
    }
    LoadedModel loaded;
    try {
        loaded.classifier =
            make_classifier(doc.at("family").get<std::string>(), doc.at("config"));
        loaded.classifier->load_params(doc.at("parameters"));
        if (doc.contains("scaler") && !doc.at("scaler").is_null())
            loaded.scaler = Standardization::from_json(doc.at("scaler"));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse_error, "invalid model file: " + std::string(e.what()));
    }
    return loaded;
}

}  // namespace malbench
