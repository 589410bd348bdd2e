#pragma once

#include <iosfwd>

#include "malbench/classifier.hpp"
#include "malbench/rng.hpp"

namespace malbench {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Feed-forward network: ReLU hidden layers, sigmoid output, binary
// cross-entropy loss, Adam optimizer, inverted dropout.
struct NetConfig {
    std::vector<std::size_t> hidden_layers;
    double dropout_rate = 0.0;
    AdamConfig adam;
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    double validation_split = 0.0;

    void validate() const;
    nlohmann::json to_json() const;
    static NetConfig from_json(const nlohmann::json& j);

    static NetConfig mlp_defaults();  // hidden [100], no dropout, 200 epochs
    static NetConfig dnn_defaults();  // hidden [128, 64], dropout 0.5, 10 epochs,
                                      // batch 32, validation split 0.2
};

struct NetParams {
    struct Layer {
        Matrix weights;  // fan_in x fan_out, row-major
        std::vector<double> bias;
    };
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().weights.rows(); }
    bool all_finite() const;
};

// He-uniform weights, zero biases; layer sizes chain input -> hidden -> 1.
NetParams net_init(std::size_t input_dim, const std::vector<std::size_t>& hidden, Rng& rng);

struct NetGradients {
    std::vector<NetParams::Layer> layers;  // same shapes as the params
};

struct AdamState {
    std::vector<NetParams::Layer> first_moment;
    std::vector<NetParams::Layer> second_moment;
    std::uint64_t step = 0;

    static AdamState zeros_like(const NetParams& params);
};

// Activations recorded by a training-mode forward pass, consumed by the
// paired backward pass (same dropout masks).
struct ForwardPass {
    std::vector<Matrix> pre_activations;   // z per layer
    std::vector<Matrix> activations;       // activations[0] is the input batch
    std::vector<Matrix> dropout_scale;     // per hidden layer: 0 or 1/(1-p)
    std::vector<double> probabilities;     // sigmoid outputs
};

// Inference: no dropout, no scaling; returns output probabilities in (0,1).
std::vector<double> net_forward(const NetParams& params, const Matrix& rows);

// Training-mode forward with inverted dropout masks drawn from mask_rng.
ForwardPass net_forward_train(const NetParams& params, const Matrix& batch,
                              double dropout_rate, Rng& mask_rng);

// Exact gradients of the mean clamped-BCE over the batch, backed through the
// recorded dropout masks.
NetGradients net_backward(const NetParams& params, const ForwardPass& pass,
                          std::span<const int> targets);

// m <- b1 m + (1-b1) g; v <- b2 v + (1-b2) g^2; bias-corrected step on every
// parameter; the step counter increments once per call.
void adam_step(NetParams& params, AdamState& state, const NetGradients& grads,
               const AdamConfig& config);

// Mean BCE with probabilities clamped to [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double> probabilities, std::span<const int> labels);

struct TrainTrace {
    struct Epoch {
        double train_loss = 0.0;
        double train_accuracy = 0.0;
        double val_loss = 0.0;      // NaN when no validation split
        double val_accuracy = 0.0;  // NaN when no validation split
    };
    std::vector<Epoch> epochs;

    void write_csv(std::ostream& out) const;
    nlohmann::json to_json() const;
};

class NetClassifier final : public Classifier {
public:
    NetClassifier(std::string family, NetConfig config)
        : family_(std::move(family)), config_(std::move(config)) {
        config_.validate();
    }

    const char* family() const override { return family_.c_str(); }
    void fit(const Dataset& train, std::uint64_t seed) override;
    bool is_fitted() const override { return fitted_; }
    std::vector<double> predict_scores(const Matrix& rows) const override;
    double decision_threshold() const override { return 0.5; }
    nlohmann::json config_json() const override { return config_.to_json(); }
    nlohmann::json params_json() const override;
    void load_params(const nlohmann::json& params) override;

    const TrainTrace& trace() const { return trace_; }
    const NetParams& params() const { return params_; }

private:
    std::string family_;
    NetConfig config_;
    NetParams params_;
    TrainTrace trace_;
    bool fitted_ = false;
};

}  // namespace malbench
