#include "malbench/selection.hpp"

#include <algorithm>
#include <cmath>

#include "malbench/error.hpp"
#include "malbench/preprocess.hpp"
#include "malbench/rng.hpp"

namespace malbench {

namespace {

// Working dataset holding the given columns (canonical order), standardized.
Dataset project_standardized(const Dataset& data, const std::vector<std::size_t>& cols) {
    Dataset out;
    out.schema.label_column = data.schema.label_column;
    out.schema.positive_label = data.schema.positive_label;
    for (std::size_t c : cols) out.schema.columns.push_back(data.schema.columns[c]);
    out.rows = Matrix(data.n_rows(), cols.size());
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out.rows(i, j) = data.rows(i, cols[j]);
    out.labels = data.labels;
    out.row_ids = data.row_ids;
    Standardization scaler = fit_standardization(out);
    scaler.apply(out.rows);
    return out;
}

std::vector<double> estimator_importance(const Dataset& working,
                                         const RfeEstimatorConfig& config,
                                         std::uint64_t round_seed) {
    if (config.id == "logreg") {
        LogRegClassifier model(config.logreg);
        model.fit(working, round_seed);
        std::vector<double> importance(model.weights().begin(), model.weights().end());
        for (double& v : importance) v = std::abs(v);
        return importance;
    }
    if (config.id == "forest") {
        ForestClassifier model(config.forest);
        model.fit(working, round_seed);
        return model.feature_importance();
    }
    fail(ErrorKind::estimator_lacks_importance,
         "estimator '" + config.id + "' exposes no per-feature importance");
}

}  // namespace

nlohmann::json RfeEstimatorConfig::to_json() const {
    return {{"id", id},
            {"logreg", logreg.to_json()},
            {"forest", forest.to_json()},
            {"seed", seed}};
}

RfeEstimatorConfig RfeEstimatorConfig::from_json(const nlohmann::json& j) {
    RfeEstimatorConfig c;
    c.id = j.value("id", c.id);
    if (j.contains("logreg")) c.logreg = LogRegConfig::from_json(j.at("logreg"));
    if (j.contains("forest")) c.forest = ForestConfig::from_json(j.at("forest"));
    c.seed = j.value("seed", c.seed);
    return c;
}

nlohmann::json RfeResult::to_json() const {
    return {{"selected", selected},
            {"ranking", ranking},
            {"estimator_id", estimator_id},
            {"step", step}};
}

RfeResult RfeResult::from_json(const nlohmann::json& j) {
    RfeResult r;
    r.selected = j.at("selected").get<std::vector<std::string>>();
    r.ranking = j.at("ranking").get<std::map<std::string, int>>();
    r.estimator_id = j.at("estimator_id").get<std::string>();
    r.step = j.at("step").get<std::size_t>();
    return r;
}

RfeResult rfe(const Dataset& train, std::size_t k, const RfeEstimatorConfig& estimator,
              std::size_t step) {
    const std::size_t d = train.n_features();
    if (k < 1 || k > d)
        fail(ErrorKind::invalid_k,
             "k = " + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
    if (step < 1) fail(ErrorKind::invalid_spec, "step must be >= 1");
    if (estimator.id != "logreg" && estimator.id != "forest")
        fail(ErrorKind::estimator_lacks_importance,
             "estimator '" + estimator.id + "' exposes no per-feature importance");

    // canonical order: lexicographic by name, so permuting the input columns
    // cannot change any arithmetic downstream
    std::vector<std::size_t> remaining(d);
    for (std::size_t j = 0; j < d; ++j) remaining[j] = j;
    std::sort(remaining.begin(), remaining.end(), [&](std::size_t a, std::size_t b) {
        return train.schema.columns[a].name < train.schema.columns[b].name;
    });

    RfeResult result;
    result.estimator_id = estimator.id;
    result.step = step;
    result.fitted_row_ids = train.row_ids;

    const std::size_t to_eliminate = d - k;
    std::size_t eliminated = 0;
    std::size_t round = 0;

    while (remaining.size() > k) {
        const std::size_t drop_n = std::min(step, remaining.size() - k);
        Dataset working = project_standardized(train, remaining);
        std::vector<double> importance =
            estimator_importance(working, estimator, derive_seed(estimator.seed, round));

        std::vector<std::size_t> order(remaining.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (importance[a] != importance[b]) return importance[a] < importance[b];
            // ties: drop the lexicographically later name first
            return train.schema.columns[remaining[a]].name >
                   train.schema.columns[remaining[b]].name;
        });

        std::vector<bool> dropped(remaining.size(), false);
        for (std::size_t i = 0; i < drop_n; ++i) {
            const std::size_t col = remaining[order[i]];
            result.ranking[train.schema.columns[col].name] =
                static_cast<int>(to_eliminate + 1 - eliminated);
            ++eliminated;
            dropped[order[i]] = true;
        }
        std::vector<std::size_t> next;
        next.reserve(remaining.size() - drop_n);
        for (std::size_t i = 0; i < remaining.size(); ++i)
            if (!dropped[i]) next.push_back(remaining[i]);
        remaining = std::move(next);
        ++round;
    }

    for (std::size_t col : remaining) {
        result.selected.push_back(train.schema.columns[col].name);
        result.ranking[train.schema.columns[col].name] = 1;
    }
    std::sort(result.selected.begin(), result.selected.end());
    return result;
}

Dataset apply_selection(const Dataset& data, const RfeResult& result) {
    std::vector<bool> keep(data.n_features(), false);
    for (const auto& name : result.selected) keep[data.column_index(name)] = true;

    Dataset out;
    out.schema.label_column = data.schema.label_column;
    out.schema.positive_label = data.schema.positive_label;
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < data.n_features(); ++j) {
        if (!keep[j]) continue;
        cols.push_back(j);
        out.schema.columns.push_back(data.schema.columns[j]);
        auto enc = data.encodings.find(data.schema.columns[j].name);
        if (enc != data.encodings.end()) out.encodings[enc->first] = enc->second;
    }
    auto label_enc = data.encodings.find(data.schema.label_column);
    if (label_enc != data.encodings.end()) out.encodings[label_enc->first] = label_enc->second;

    out.rows = Matrix(data.n_rows(), cols.size());
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out.rows(i, j) = data.rows(i, cols[j]);
    out.labels = data.labels;
    out.row_ids = data.row_ids;
    return out;
}

}  // namespace malbench
