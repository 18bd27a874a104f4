#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drtsoh/linalg.hpp"

namespace drtsoh {

/// Architecture of the sequence-to-sequence SOH regressor: three LSTM layers
/// with SELU on their output sequences, then three linear FC layers ending in
/// a scalar per time step.
struct ModelConfig {
    std::size_t input_dim = 81;
    std::array<std::size_t, 3> lstm_hidden{128, 96, 64};
    std::array<std::size_t, 3> fc_dims{64, 32, 1};
    double selu_alpha = 1.6732632423543772;
    double selu_scale = 1.0507009873554805;

    void validate() const;
};

double selu(double x);
double selu_grad(double x);

/// Gate order in the stacked 4H rows: input, forget, candidate, output.
struct LstmLayerParams {
    linalg::Matrix w_input; // 4H x D
    linalg::Matrix w_recur; // 4H x H
    linalg::Vector bias;    // 4H
};

struct FcLayerParams {
    linalg::Matrix w; // out x in
    linalg::Vector b; // out
};

struct SohModelParams {
    ModelConfig config;
    std::vector<LstmLayerParams> lstm;
    std::vector<FcLayerParams> fc;

    static SohModelParams zeros(const ModelConfig& config);
    /// Uniform +-1/sqrt(fan_in) init, fully determined by the seed.
    static SohModelParams init_random(const ModelConfig& config, std::uint64_t seed);

    std::size_t param_count() const;

    /// Parameter tensors in a fixed order (LSTM layers then FC layers);
    /// the order defines the flat/checkpoint layout.
    std::vector<std::vector<double>*> tensor_list();
    std::vector<const std::vector<double>*> tensor_list() const;

    std::vector<double> flatten() const;
    static SohModelParams from_flat(const ModelConfig& config, std::span<const double> flat);
};

/// Per-sequence activations retained for backpropagation through time.
struct ForwardCache {
    // [layer][t]
    std::vector<std::vector<linalg::Vector>> x, h_prev, c_prev;
    std::vector<std::vector<linalg::Vector>> gate_i, gate_f, gate_g, gate_o;
    std::vector<std::vector<linalg::Vector>> c, tanh_c, h; // h is pre-SELU
    std::vector<std::vector<linalg::Vector>> y;            // selu(h)
    std::vector<std::vector<linalg::Vector>> fc_in;        // [fc layer][t]
    std::vector<double> outputs;                           // [t]
};

/// Run the model over a T-step sequence; returns one SOH estimate per step.
std::vector<double> forward(const SohModelParams& params,
                            const std::vector<linalg::Vector>& inputs,
                            ForwardCache* cache = nullptr);

/// Mean squared error over a sequence.
double mse(std::span<const double> outputs, std::span<const double> targets);

/// Exact gradients of loss_scale * MSE(outputs, targets) for every parameter.
SohModelParams backward(const SohModelParams& params, const ForwardCache& cache,
                        std::span<const double> targets, double loss_scale = 1.0);

struct AdamState {
    std::vector<double> m, v;
    std::int64_t t = 0;

    static AdamState zeros(std::size_t param_count);
};

/// Bias-corrected Adam update, in place.
void adam_step(SohModelParams& params, const SohModelParams& grads, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

struct TrainConfig {
    double lr0 = 1e-3;
    double plateau_factor = 0.5;
    int plateau_patience = 10;
    double plateau_min_delta = 1e-6;
    double min_lr = 1e-7; ///< no further halving below this
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int max_epochs = 400;
    std::size_t batch_size = 2;
    bool restore_best_val = true; ///< return the weights from the best validation epoch
    std::uint64_t seed = 0;

    void validate() const;
};

/// One cell's sequence: T DRT density vectors and T SOH targets.
struct SequenceSample {
    std::string cell_id;
    std::vector<linalg::Vector> inputs;
    std::vector<double> targets;
};

/// Per-feature standardization; statistics always come from the training
/// split only.
struct Normalizer {
    linalg::Vector mean, stddev;

    static Normalizer fit(std::span<const SequenceSample> train);
    linalg::Vector apply(const linalg::Vector& x) const;
};

/// Trained artifact: parameters plus the input normalizer.
struct SohModel {
    SohModelParams params;
    Normalizer norm;
};

std::vector<double> predict(const SohModel& model, const SequenceSample& sample);

struct EpochStats {
    int epoch = 0;
    double train_mse = 0.0;
    double val_mse = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    SohModel model;
    std::vector<EpochStats> history;
};

// Minibatch Adam on MSE with a reduce-on-plateau schedule (factor 0.5).
// Per-sample batch gradients may run in parallel; they are combined by a
// fixed pairwise tree reduction, so results are identical for any thread
// count and fully determined by tc.seed.
TrainResult train(const ModelConfig& config, const std::vector<SequenceSample>& train_set,
                  const std::vector<SequenceSample>& val_set, const TrainConfig& tc);

double rmse(std::span<const double> y, std::span<const double> y_hat);
/// Root mean squared percentage error, in percent. All y must be nonzero.
double rmspe_pct(std::span<const double> y, std::span<const double> y_hat);

} // namespace drtsoh
