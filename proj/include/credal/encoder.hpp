#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "credal/attention.hpp"

namespace credal {

struct ModelConfig {
    int vocab_size = 64;
    int seq_len = 16;
    int d_model = 32;
    int d_ff = 64;
    int n_heads = 4;
    int n_layers = 2;
    int n_classes = 2;
    Mechanism mechanism = Mechanism::kCredal;
    std::uint64_t seed = 1;

    void validate() const;
};

struct LayerParams {
    Tensor ln1_gain, ln1_bias;
    Tensor wq, wk, wv, wo;  // [d_model x d_model]; per-head blocks are d_model x d_head columns
    Tensor ln2_gain, ln2_bias;
    Tensor w1, b1;  // [d_model x d_ff], [d_ff]
    Tensor w2, b2;  // [d_ff x d_model], [d_model]
};

struct ModelParams {
    Tensor embedding;  // [vocab x d_model]
    std::vector<LayerParams> layers;
    Tensor head;  // [d_model x n_classes]

    // Stable traversal order; names match the checkpoint key schema.
    std::vector<std::pair<std::string, Tensor>> named() const;
    void zero_grad();
    std::size_t param_count() const;
};

// Deterministic init: linear weights ~ N(0, 1/fan_in), layer-norm gain 1 /
// bias 0, FFN biases 0. Same seed gives bitwise-identical parameters.
ModelParams init_params(const ModelConfig& cfg);

struct ClassifierOutput {
    Tensor logits;  // [1 x n_classes]
    // Per layer, per head vacuity [L]; empty in standard mode.
    std::vector<std::vector<Tensor>> layer_vacuity;
    // Mean vacuity over heads x positions of the final layer; absent in
    // standard mode.
    std::optional<double> model_uncertainty;
};

// embedding + sinusoidal positions -> n_layers x (pre-norm attention +
// residual, pre-norm GELU FFN + residual) -> mean pool -> classifier head.
ClassifierOutput forward_classify(Graph& g, const ModelParams& params, const ModelConfig& cfg,
                                  const std::vector<int>& tokens);

// Mean of the final encoder layer's per-head, per-query vacuities.
double model_uncertainty(const ClassifierOutput& out);

// Row-major [L x d_model] sin/cos table.
std::vector<double> sinusoidal_positions(int seq_len, int d_model);

}  // namespace credal
