#include "malbench/knn.hpp"

#include <algorithm>
#include <numeric>

#include "malbench/error.hpp"
#include "malbench/kernels.hpp"

namespace malbench {

void KnnConfig::validate() const {
    if (k < 1) fail(ErrorKind::invalid_spec, "k must be at least 1");
}

nlohmann::json KnnConfig::to_json() const { return {{"k", k}}; }

KnnConfig KnnConfig::from_json(const nlohmann::json& j) {
    KnnConfig c;
    c.k = j.value("k", c.k);
    c.validate();
    return c;
}

void KnnClassifier::fit(const Dataset& train, std::uint64_t /*seed*/) {
    if (train.n_rows() == 0) fail(ErrorKind::empty_dataset, "knn fit on empty dataset");
    if (config_.k > train.n_rows())
        fail(ErrorKind::k_too_large, "k = " + std::to_string(config_.k) + " exceeds " +
                                         std::to_string(train.n_rows()) + " training rows");
    train_rows_ = train.rows;
    train_labels_ = train.labels;
    fitted_ = true;
}

std::vector<double> KnnClassifier::predict_scores(const Matrix& rows) const {
    if (!fitted_) fail(ErrorKind::invalid_spec, "predict before fit");
    if (rows.cols() != train_rows_.cols())
        fail(ErrorKind::shape_mismatch, "feature width does not match the fitted model");
    const std::size_t n_train = train_rows_.rows();
    const std::size_t d = train_rows_.cols();
    const std::size_t k = config_.k;

    std::vector<double> scores(rows.rows());
    std::vector<double> dist(n_train);
    std::vector<std::size_t> order(n_train);
    for (std::size_t q = 0; q < rows.rows(); ++q) {
        const double* query = rows.row(q);
        for (std::size_t i = 0; i < n_train; ++i)
            dist[i] = kern::sqdist(query, train_rows_.row(i), d);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                          order.end(), [&](std::size_t a, std::size_t b) {
                              if (dist[a] != dist[b]) return dist[a] < dist[b];
                              return a < b;  // ties: lower training-row index first
                          });
        std::size_t positives = 0;
        for (std::size_t i = 0; i < k; ++i)
            positives += static_cast<std::size_t>(train_labels_[order[i]]);
        scores[q] = static_cast<double>(positives) / static_cast<double>(k);
    }
    return scores;
}

nlohmann::json KnnClassifier::params_json() const {
    // training matrix stored inline: the fitted model is the data
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < train_rows_.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < train_rows_.cols(); ++j) row.push_back(train_rows_(i, j));
        rows.push_back(std::move(row));
    }
    return {{"train_rows", rows}, {"train_labels", train_labels_}};
}

void KnnClassifier::load_params(const nlohmann::json& params) {
    const auto& rows = params.at("train_rows");
    std::vector<std::vector<double>> data;
    data.reserve(rows.size());
    for (const auto& r : rows) data.push_back(r.get<std::vector<double>>());
    train_rows_ = Matrix::from_rows(data);
    train_labels_ = params.at("train_labels").get<std::vector<int>>();
    if (train_labels_.size() != train_rows_.rows())
        fail(ErrorKind::parse_error, "knn parameters misaligned");
    if (config_.k > train_rows_.rows())
        fail(ErrorKind::k_too_large, "k exceeds stored training rows");
    fitted_ = true;
}

}  // namespace malbench
