#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsf/pipeline.hpp"
#include "tsf/rng.hpp"
#include "tsf/tensor.hpp"

namespace tsf {

enum class ModelKind { persistence, rnn, lstm, gru, transformer };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

enum class HeadActivation { sigmoid, linear };

/// Gate parameters for one recurrent cell. Every weight matrix has shape
/// n x (m+n) and acts on the concatenation of the input with the previous
/// state; every bias is n x 1.
///
///   rnn:  weights = {W_xs},             biases = {b_s}
///   lstm: weights = {W_f, W_i, W_C, W_O}, biases likewise
///   gru:  weights = {W_r, W_z, W_S},      biases likewise
struct RecurrentCellParams {
    ModelKind kind = ModelKind::rnn;
    std::size_t input_size = 0;   // m
    std::size_t hidden_size = 0;  // n
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;
};

RecurrentCellParams make_recurrent_cell(ModelKind kind, std::size_t input_size,
                                        std::size_t hidden_size, Rng& rng);

/// Scalar readout from the final hidden state: activation(W_y * s + b_y)
/// with W_y of shape 1 x n.
struct OutputHead {
    Tensor weight;
    Tensor bias;
    HeadActivation activation = HeadActivation::sigmoid;
};

OutputHead make_output_head(std::size_t hidden_size, HeadActivation activation, Rng& rng);
Tensor apply_head(const OutputHead& head, const Tensor& state);

// Cell steps. x is m x B, states are n x B; any batch width works.
Tensor rnn_step(const RecurrentCellParams& p, const Tensor& x, const Tensor& s_prev);
std::pair<Tensor, Tensor> lstm_step(const RecurrentCellParams& p, const Tensor& x,
                                    const Tensor& s_prev, const Tensor& c_prev);
Tensor gru_step(const RecurrentCellParams& p, const Tensor& x, const Tensor& s_prev);

/// Unrolls the cell over the window steps (each m x B, time-ordered) from
/// zero initial state and applies the head: returns 1 x B predictions.
Tensor run_recurrent_batch(const RecurrentCellParams& cell, const OutputHead& head,
                           const std::vector<Tensor>& steps);

/// Single-window convenience: window is m x w (columns are time steps).
Tensor run_recurrent(const RecurrentCellParams& cell, const OutputHead& head,
                     const Tensor& window);

/// Sinusoidal table, shape length x d_model:
/// PE[p, 2i] = sin(p / 10000^(2i/d)), PE[p, 2i+1] = cos(p / 10000^(2i/d)).
Tensor positional_encoding(std::size_t length, std::size_t d_model);

struct TransformerConfig {
    std::size_t d_model = 64;
    std::size_t num_heads = 4;
    std::size_t num_encoder_layers = 2;
    std::size_t num_decoder_layers = 2;
    std::size_t feedforward_size = 128;
    double dropout_rate = 0.1;

    bool operator==(const TransformerConfig&) const = default;
};

struct AttentionParams {
    std::vector<Tensor> wq, wk, wv;  // per head, d_head x d_model
    Tensor wo;                       // d_model x d_model
    Tensor bo;                       // d_model x 1
};

/// Multi-head attention over column-per-position sequences (d_model x len).
/// With causal set, position i attends only to positions <= i.
Tensor multi_head_attention(const Tensor& q_in, const Tensor& k_in, const Tensor& v_in,
                            const AttentionParams& params, std::size_t num_heads,
                            bool causal);

struct LayerNormParams {
    Tensor gamma;  // d_model x 1
    Tensor beta;   // d_model x 1
};

struct TransformerParams {
    TransformerConfig config;
    std::size_t input_size = 0;  // m

    Tensor input_proj;       // d_model x m
    Tensor input_proj_bias;  // d_model x 1
    Tensor target_proj;      // d_model x 1
    Tensor target_proj_bias;

    struct EncoderLayer {
        AttentionParams self_attn;
        LayerNormParams ln1, ln2;
        Tensor ff_w1, ff_b1, ff_w2, ff_b2;
    };
    struct DecoderLayer {
        AttentionParams self_attn;
        AttentionParams cross_attn;
        LayerNormParams ln1, ln2, ln3;
        Tensor ff_w1, ff_b1, ff_w2, ff_b2;
    };
    std::vector<EncoderLayer> encoder;
    std::vector<DecoderLayer> decoder;
    LayerNormParams encoder_norm;
    LayerNormParams decoder_norm;
    Tensor output_proj;  // 1 x d_model
    Tensor output_bias;  // 1 x 1
};

TransformerParams make_transformer(const TransformerConfig& config,
                                   std::size_t input_size, Rng& rng);

enum class DecodeMode { teacher_forced, autoregressive };

/// Full encoder-decoder pass over one window (m x w, columns are time).
/// start_value is the last observed scaled target; in teacher_forced mode
/// future_targets must hold the k true labels (positions t+1 .. t+k) and the
/// decoder consumes [start, label_1 .. label_{k-1}] in one masked pass.
/// Returns 1 x k predictions; evaluation reads position k (the last column).
/// dropout_rng enables dropout at the configured rate; null disables it.
Tensor transformer_forward(const TransformerParams& params, const Tensor& window,
                           double start_value, std::size_t horizon, DecodeMode mode,
                           std::span<const double> future_targets = {},
                           Rng* dropout_rng = nullptr);

/// Last observed target value in the window, whatever the horizon.
double persistence_forecast(std::span<const double> window_target, std::size_t k);

}  // namespace tsf
