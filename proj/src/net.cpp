#include "malbench/net.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "malbench/error.hpp"
#include "malbench/kernels.hpp"

namespace malbench {

namespace {

constexpr double kProbClamp = 1e-12;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_prob(double p) {
    if (p < kProbClamp) return kProbClamp;
    if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
    return p;
}

// z = a W + b over a batch: one axpy per (row, input unit).
void dense_forward(const Matrix& a, const Matrix& w, const std::vector<double>& b, Matrix& z) {
    const std::size_t batch = a.rows();
    const std::size_t fan_in = w.rows();
    const std::size_t fan_out = w.cols();
    z = Matrix(batch, fan_out);
    for (std::size_t i = 0; i < batch; ++i) {
        double* zi = z.row(i);
        for (std::size_t j = 0; j < fan_out; ++j) zi[j] = b[j];
        const double* ai = a.row(i);
        for (std::size_t r = 0; r < fan_in; ++r) kern::axpy(ai[r], w.row(r), zi, fan_out);
    }
}

double accuracy_of(std::span<const double> probs, std::span<const int> labels) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        correct += static_cast<std::size_t>((probs[i] >= 0.5 ? 1 : 0) == labels[i]);
    return static_cast<double>(correct) / static_cast<double>(probs.size());
}

}  // namespace

void NetConfig::validate() const {
    for (std::size_t units : hidden_layers)
        if (units < 1) fail(ErrorKind::invalid_spec, "hidden layer with zero units");
    if (batch_size < 1) fail(ErrorKind::invalid_spec, "batch_size must be >= 1");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        fail(ErrorKind::invalid_spec, "dropout_rate outside [0,1)");
    if (validation_split < 0.0 || validation_split >= 1.0)
        fail(ErrorKind::invalid_spec, "validation_split outside [0,1)");
    if (adam.learning_rate <= 0.0) fail(ErrorKind::invalid_spec, "learning rate must be positive");
}

nlohmann::json NetConfig::to_json() const {
    return {{"hidden_layers", hidden_layers},
            {"dropout_rate", dropout_rate},
            {"optimizer",
             {{"name", "adam"},
              {"learning_rate", adam.learning_rate},
              {"beta1", adam.beta1},
              {"beta2", adam.beta2},
              {"epsilon", adam.epsilon}}},
            {"loss", "binary_cross_entropy"},
            {"activation_hidden", "relu"},
            {"activation_output", "sigmoid"},
            {"epochs", epochs},
            {"batch_size", batch_size},
            {"validation_split", validation_split}};
}

NetConfig NetConfig::from_json(const nlohmann::json& j) {
    NetConfig c;
    c.hidden_layers = j.value("hidden_layers", c.hidden_layers);
    c.dropout_rate = j.value("dropout_rate", c.dropout_rate);
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        c.adam.learning_rate = o.value("learning_rate", c.adam.learning_rate);
        c.adam.beta1 = o.value("beta1", c.adam.beta1);
        c.adam.beta2 = o.value("beta2", c.adam.beta2);
        c.adam.epsilon = o.value("epsilon", c.adam.epsilon);
    }
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.validation_split = j.value("validation_split", c.validation_split);
    c.validate();
    return c;
}

NetConfig NetConfig::mlp_defaults() {
    NetConfig c;
    c.hidden_layers = {100};
    c.dropout_rate = 0.0;
    c.epochs = 200;
    c.batch_size = 32;
    c.validation_split = 0.0;
    return c;
}

NetConfig NetConfig::dnn_defaults() {
    NetConfig c;
    c.hidden_layers = {128, 64};
    c.dropout_rate = 0.5;
    c.epochs = 10;
    c.batch_size = 32;
    c.validation_split = 0.2;
    return c;
}

bool NetParams::all_finite() const {
    for (const auto& layer : layers) {
        if (!layer.weights.all_finite()) return false;
        for (double b : layer.bias)
            if (!std::isfinite(b)) return false;
    }
    return true;
}

NetParams net_init(std::size_t input_dim, const std::vector<std::size_t>& hidden, Rng& rng) {
    if (input_dim == 0) fail(ErrorKind::shape_mismatch, "network needs at least one input");
    std::vector<std::size_t> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);

    NetParams params;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        NetParams::Layer layer;
        const std::size_t fan_in = dims[l];
        const std::size_t fan_out = dims[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
        layer.weights = Matrix(fan_in, fan_out);
        for (std::size_t r = 0; r < fan_in; ++r)
            for (std::size_t c = 0; c < fan_out; ++c)
                layer.weights(r, c) = rng.uniform(-limit, limit);
        layer.bias.assign(fan_out, 0.0);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

AdamState AdamState::zeros_like(const NetParams& params) {
    AdamState state;
    for (const auto& layer : params.layers) {
        NetParams::Layer zero;
        zero.weights = Matrix(layer.weights.rows(), layer.weights.cols());
        zero.bias.assign(layer.bias.size(), 0.0);
        state.first_moment.push_back(zero);
        state.second_moment.push_back(std::move(zero));
    }
    return state;
}

std::vector<double> net_forward(const NetParams& params, const Matrix& rows) {
    if (params.layers.empty()) fail(ErrorKind::shape_mismatch, "uninitialized network");
    if (rows.cols() != params.input_dim())
        fail(ErrorKind::shape_mismatch, "row width does not match the network input");
    Matrix a = rows;
    Matrix z;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        dense_forward(a, params.layers[l].weights, params.layers[l].bias, z);
        if (l + 1 < params.layers.size()) {
            a = Matrix(z.rows(), z.cols());
            kern::relu(z.data(), a.data(), z.rows() * z.cols());
        } else {
            a = std::move(z);
        }
    }
    std::vector<double> probs(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) probs[i] = sigmoid(a(i, 0));
    return probs;
}

ForwardPass net_forward_train(const NetParams& params, const Matrix& batch,
                              double dropout_rate, Rng& mask_rng) {
    if (params.layers.empty()) fail(ErrorKind::shape_mismatch, "uninitialized network");
    if (batch.cols() != params.input_dim())
        fail(ErrorKind::shape_mismatch, "batch width does not match the network input");

    ForwardPass pass;
    pass.activations.push_back(batch);
    const double keep = 1.0 - dropout_rate;

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        Matrix z;
        dense_forward(pass.activations.back(), params.layers[l].weights, params.layers[l].bias,
                      z);
        if (l + 1 < params.layers.size()) {
            Matrix a(z.rows(), z.cols());
            kern::relu(z.data(), a.data(), z.rows() * z.cols());
            Matrix scale(z.rows(), z.cols(), 1.0);
            if (dropout_rate > 0.0) {
                for (std::size_t i = 0; i < scale.rows(); ++i)
                    for (std::size_t j = 0; j < scale.cols(); ++j) {
                        const bool kept = mask_rng.uniform01() >= dropout_rate;
                        scale(i, j) = kept ? 1.0 / keep : 0.0;
                        a(i, j) *= scale(i, j);
                    }
            }
            pass.dropout_scale.push_back(std::move(scale));
            pass.pre_activations.push_back(std::move(z));
            pass.activations.push_back(std::move(a));
        } else {
            pass.probabilities.resize(z.rows());
            for (std::size_t i = 0; i < z.rows(); ++i) pass.probabilities[i] = sigmoid(z(i, 0));
            Matrix out(z.rows(), 1);
            for (std::size_t i = 0; i < z.rows(); ++i) out(i, 0) = pass.probabilities[i];
            pass.pre_activations.push_back(std::move(z));
            pass.activations.push_back(std::move(out));
        }
    }
    return pass;
}

NetGradients net_backward(const NetParams& params, const ForwardPass& pass,
                          std::span<const int> targets) {
    const std::size_t n_layers = params.layers.size();
    const std::size_t batch = pass.activations.front().rows();
    if (targets.size() != batch) fail(ErrorKind::shape_mismatch, "targets do not match batch");

    NetGradients grads;
    grads.layers.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        grads.layers[l].weights =
            Matrix(params.layers[l].weights.rows(), params.layers[l].weights.cols());
        grads.layers[l].bias.assign(params.layers[l].bias.size(), 0.0);
    }

    // sigmoid + BCE collapse to (p - y) / batch at the output
    Matrix delta(batch, 1);
    for (std::size_t i = 0; i < batch; ++i)
        delta(i, 0) = (pass.probabilities[i] - static_cast<double>(targets[i])) /
                      static_cast<double>(batch);

    for (std::size_t l = n_layers; l-- > 0;) {
        const Matrix& a_prev = pass.activations[l];
        Matrix& dw = grads.layers[l].weights;
        std::vector<double>& db = grads.layers[l].bias;
        const std::size_t fan_in = dw.rows();
        const std::size_t fan_out = dw.cols();

        for (std::size_t i = 0; i < batch; ++i) {
            const double* di = delta.row(i);
            const double* ai = a_prev.row(i);
            for (std::size_t r = 0; r < fan_in; ++r) kern::axpy(ai[r], di, dw.row(r), fan_out);
            kern::axpy(1.0, di, db.data(), fan_out);
        }

        if (l == 0) break;
        Matrix da(batch, fan_in);
        const Matrix& w = params.layers[l].weights;
        for (std::size_t i = 0; i < batch; ++i) {
            const double* di = delta.row(i);
            for (std::size_t r = 0; r < fan_in; ++r)
                da(i, r) = kern::dot(di, w.row(r), fan_out);
        }
        // back through dropout, then ReLU
        const Matrix& scale = pass.dropout_scale[l - 1];
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t r = 0; r < fan_in; ++r) da(i, r) *= scale(i, r);
        const Matrix& z = pass.pre_activations[l - 1];
        delta = Matrix(batch, fan_in);
        kern::relu_backward(z.data(), da.data(), delta.data(), batch * fan_in);
    }
    return grads;
}

void adam_step(NetParams& params, AdamState& state, const NetGradients& grads,
               const AdamConfig& config) {
    if (state.first_moment.size() != params.layers.size())
        fail(ErrorKind::shape_mismatch, "adam state does not match parameters");
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(config.beta1, t);
    const double bc2 = 1.0 - std::pow(config.beta2, t);

    auto update = [&](double& theta, double g, double& m, double& v) {
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g * g;
        theta -= config.learning_rate * (m / bc1) / (std::sqrt(v / bc2) + config.epsilon);
    };

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& layer = params.layers[l];
        const auto& glayer = grads.layers[l];
        auto& m = state.first_moment[l];
        auto& v = state.second_moment[l];
        double* w = layer.weights.data();
        const double* gw = glayer.weights.data();
        double* mw = m.weights.data();
        double* vw = v.weights.data();
        const std::size_t wn = layer.weights.rows() * layer.weights.cols();
        for (std::size_t i = 0; i < wn; ++i) update(w[i], gw[i], mw[i], vw[i]);
        for (std::size_t i = 0; i < layer.bias.size(); ++i)
            update(layer.bias[i], glayer.bias[i], m.bias[i], v.bias[i]);
    }
}

double bce_loss(std::span<const double> probabilities, std::span<const int> labels) {
    if (probabilities.size() != labels.size())
        fail(ErrorKind::length_mismatch, "probabilities and labels differ in length");
    double loss = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = clamp_prob(probabilities[i]);
        loss -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    return loss / static_cast<double>(probabilities.size());
}

void TrainTrace::write_csv(std::ostream& out) const {
    out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
    for (std::size_t e = 0; e < epochs.size(); ++e) {
        out << (e + 1) << ',' << epochs[e].train_loss << ',' << epochs[e].train_accuracy << ','
            << epochs[e].val_loss << ',' << epochs[e].val_accuracy << '\n';
    }
}

nlohmann::json TrainTrace::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : epochs) {
        nlohmann::json row = {{"train_loss", e.train_loss}, {"train_acc", e.train_accuracy}};
        // NaN has no JSON encoding; omit validation fields when absent
        if (std::isfinite(e.val_loss)) {
            row["val_loss"] = e.val_loss;
            row["val_acc"] = e.val_accuracy;
        }
        arr.push_back(std::move(row));
    }
    return arr;
}

void NetClassifier::fit(const Dataset& train, std::uint64_t seed) {
    if (train.n_rows() == 0) fail(ErrorKind::empty_dataset, "net fit on empty dataset");
    const std::size_t n = train.n_rows();
    const std::size_t d = train.n_features();

    Rng rng(seed);

    // validation rows carved once before epoch 1
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t n_val = static_cast<std::size_t>(
        std::llround(config_.validation_split * static_cast<double>(n)));
    if (n_val >= n) fail(ErrorKind::invalid_spec, "validation split leaves no training rows");
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<std::size_t> fit_idx(order.begin() + n_val, order.end());

    params_ = net_init(d, config_.hidden_layers, rng);
    AdamState adam = AdamState::zeros_like(params_);
    trace_.epochs.clear();

    Matrix fit_rows(fit_idx.size(), d);
    std::vector<int> fit_labels(fit_idx.size());
    for (std::size_t i = 0; i < fit_idx.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) fit_rows(i, j) = train.rows(fit_idx[i], j);
        fit_labels[i] = train.labels[fit_idx[i]];
    }
    Matrix val_rows(val_idx.size(), d);
    std::vector<int> val_labels(val_idx.size());
    for (std::size_t i = 0; i < val_idx.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) val_rows(i, j) = train.rows(val_idx[i], j);
        val_labels[i] = train.labels[val_idx[i]];
    }

    std::vector<std::size_t> batch_order(fit_idx.size());
    for (std::size_t i = 0; i < batch_order.size(); ++i) batch_order[i] = i;

    for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
        rng.shuffle(batch_order);
        for (std::size_t start = 0; start < batch_order.size(); start += config_.batch_size) {
            const std::size_t stop = std::min(start + config_.batch_size, batch_order.size());
            Matrix batch(stop - start, d);
            std::vector<int> targets(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                const std::size_t src = batch_order[i];
                for (std::size_t j = 0; j < d; ++j) batch(i - start, j) = fit_rows(src, j);
                targets[i - start] = fit_labels[src];
            }
            ForwardPass pass = net_forward_train(params_, batch, config_.dropout_rate, rng);
            NetGradients grads = net_backward(params_, pass, targets);
            adam_step(params_, adam, grads, config_.adam);
        }

        TrainTrace::Epoch entry;
        std::vector<double> train_probs = net_forward(params_, fit_rows);
        entry.train_loss = bce_loss(train_probs, fit_labels);
        entry.train_accuracy = accuracy_of(train_probs, fit_labels);
        if (!val_idx.empty()) {
            std::vector<double> val_probs = net_forward(params_, val_rows);
            entry.val_loss = bce_loss(val_probs, val_labels);
            entry.val_accuracy = accuracy_of(val_probs, val_labels);
        } else {
            entry.val_loss = std::numeric_limits<double>::quiet_NaN();
            entry.val_accuracy = std::numeric_limits<double>::quiet_NaN();
        }
        if (!std::isfinite(entry.train_loss) || !params_.all_finite())
            fail(ErrorKind::non_finite_loss, "network training diverged");
        trace_.epochs.push_back(entry);
    }
    fitted_ = true;
}

std::vector<double> NetClassifier::predict_scores(const Matrix& rows) const {
    if (!fitted_) fail(ErrorKind::invalid_spec, "predict before fit");
    return net_forward(params_, rows);
}

nlohmann::json NetClassifier::params_json() const {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : params_.layers) {
        std::vector<double> flat(layer.weights.data(),
                                 layer.weights.data() + layer.weights.rows() * layer.weights.cols());
        layers.push_back({{"W", flat}, {"b", layer.bias}});
    }
    return {{"layers", layers}};
}

void NetClassifier::load_params(const nlohmann::json& params) {
    params_.layers.clear();
    for (const auto& lj : params.at("layers")) {
        NetParams::Layer layer;
        layer.bias = lj.at("b").get<std::vector<double>>();
        std::vector<double> flat = lj.at("W").get<std::vector<double>>();
        const std::size_t fan_out = layer.bias.size();
        if (fan_out == 0 || flat.size() % fan_out != 0)
            fail(ErrorKind::parse_error, "layer shape mismatch in parameters");
        const std::size_t fan_in = flat.size() / fan_out;
        layer.weights = Matrix(fan_in, fan_out);
        for (std::size_t r = 0; r < fan_in; ++r)
            for (std::size_t c = 0; c < fan_out; ++c) layer.weights(r, c) = flat[r * fan_out + c];
        params_.layers.push_back(std::move(layer));
    }
    if (params_.layers.empty()) fail(ErrorKind::parse_error, "network without layers");
    fitted_ = true;
}

}  // namespace malbench
