#include <cmath>
#include <limits>

#include "tsf/error.hpp"
#include "tsf/models.hpp"

namespace tsf {

namespace {

Tensor uniform_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    return Tensor::uniform_init(rows, cols, bound, rng);
}

AttentionParams make_attention(std::size_t d_model, std::size_t num_heads, Rng& rng) {
    AttentionParams a;
    const std::size_t d_head = d_model / num_heads;
    for (std::size_t h = 0; h < num_heads; ++h) {
        a.wq.push_back(uniform_matrix(d_head, d_model, rng));
        a.wk.push_back(uniform_matrix(d_head, d_model, rng));
        a.wv.push_back(uniform_matrix(d_head, d_model, rng));
    }
    a.wo = uniform_matrix(d_model, d_model, rng);
    a.bo = Tensor::zeros(d_model, 1, true);
    return a;
}

LayerNormParams make_layer_norm(std::size_t d_model) {
    LayerNormParams ln;
    ln.gamma = Tensor::from_data(std::vector<double>(d_model, 1.0), d_model, 1, true);
    ln.beta = Tensor::zeros(d_model, 1, true);
    return ln;
}

/// Additive mask: 0 on and below the diagonal, -inf above (j > i).
Tensor causal_mask(std::size_t len) {
    Tensor mask(len, len);
    auto data = mask.mutable_data();
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = i + 1; j < len; ++j) data[i * len + j] = neg_inf;
    return mask;
}

Tensor feed_forward(const Tensor& x, const Tensor& w1, const Tensor& b1,
                    const Tensor& w2, const Tensor& b2) {
    return add(matmul(w2, relu(add(matmul(w1, x), b1))), b2);
}

Tensor maybe_dropout(const Tensor& x, double rate, Rng* rng) {
    return rng ? dropout(x, rate, *rng) : x;
}

/// Positions as columns: d_model x len slice of the encoding table.
Tensor positional_encoding_cols(std::size_t len, std::size_t d_model) {
    const Tensor pe = positional_encoding(len, d_model);
    Tensor out(d_model, len);
    for (std::size_t p = 0; p < len; ++p)
        for (std::size_t i = 0; i < d_model; ++i) out.at(i, p) = pe.at(p, i);
    return out;
}

Tensor encode(const TransformerParams& tp, const Tensor& window, Rng* dropout_rng) {
    const TransformerConfig& cfg = tp.config;
    Tensor x = add(add(matmul(tp.input_proj, window), tp.input_proj_bias),
                   positional_encoding_cols(window.cols(), cfg.d_model));
    x = maybe_dropout(x, cfg.dropout_rate, dropout_rng);
    for (const auto& layer : tp.encoder) {
        const Tensor a_in = layer_norm_cols(x, layer.ln1.gamma, layer.ln1.beta);
        const Tensor attn = multi_head_attention(a_in, a_in, a_in, layer.self_attn,
                                                 cfg.num_heads, false);
        x = add(x, maybe_dropout(attn, cfg.dropout_rate, dropout_rng));
        const Tensor f_in = layer_norm_cols(x, layer.ln2.gamma, layer.ln2.beta);
        const Tensor ff = feed_forward(f_in, layer.ff_w1, layer.ff_b1, layer.ff_w2,
                                       layer.ff_b2);
        x = add(x, maybe_dropout(ff, cfg.dropout_rate, dropout_rng));
    }
    return layer_norm_cols(x, tp.encoder_norm.gamma, tp.encoder_norm.beta);
}

/// One masked decoder pass over the given token values; returns 1 x len.
Tensor decode(const TransformerParams& tp, const Tensor& memory,
              const std::vector<double>& tokens, Rng* dropout_rng) {
    const TransformerConfig& cfg = tp.config;
    const std::size_t len = tokens.size();
    const Tensor token_row =
        Tensor::from_data(std::vector<double>(tokens), 1, len);
    Tensor x = add(add(matmul(tp.target_proj, token_row), tp.target_proj_bias),
                   positional_encoding_cols(len, cfg.d_model));
    x = maybe_dropout(x, cfg.dropout_rate, dropout_rng);
    for (const auto& layer : tp.decoder) {
        const Tensor a_in = layer_norm_cols(x, layer.ln1.gamma, layer.ln1.beta);
        const Tensor self_attn = multi_head_attention(a_in, a_in, a_in, layer.self_attn,
                                                      cfg.num_heads, true);
        x = add(x, maybe_dropout(self_attn, cfg.dropout_rate, dropout_rng));
        const Tensor c_in = layer_norm_cols(x, layer.ln2.gamma, layer.ln2.beta);
        const Tensor cross = multi_head_attention(c_in, memory, memory, layer.cross_attn,
                                                  cfg.num_heads, false);
        x = add(x, maybe_dropout(cross, cfg.dropout_rate, dropout_rng));
        const Tensor f_in = layer_norm_cols(x, layer.ln3.gamma, layer.ln3.beta);
        const Tensor ff = feed_forward(f_in, layer.ff_w1, layer.ff_b1, layer.ff_w2,
                                       layer.ff_b2);
        x = add(x, maybe_dropout(ff, cfg.dropout_rate, dropout_rng));
    }
    x = layer_norm_cols(x, tp.decoder_norm.gamma, tp.decoder_norm.beta);
    return add(matmul(tp.output_proj, x), tp.output_bias);
}

}  // namespace

Tensor positional_encoding(std::size_t length, std::size_t d_model) {
    if (d_model % 2 != 0)
        throw ContractError("positional_encoding: d_model must be even");
    Tensor pe(length, d_model);
    for (std::size_t p = 0; p < length; ++p) {
        for (std::size_t i = 0; i < d_model / 2; ++i) {
            const double rate =
                std::pow(10000.0, 2.0 * static_cast<double>(i) /
                                      static_cast<double>(d_model));
            const double angle = static_cast<double>(p) / rate;
            pe.at(p, 2 * i) = std::sin(angle);
            pe.at(p, 2 * i + 1) = std::cos(angle);
        }
    }
    return pe;
}

Tensor multi_head_attention(const Tensor& q_in, const Tensor& k_in, const Tensor& v_in,
                            const AttentionParams& params, std::size_t num_heads,
                            bool causal) {
    const std::size_t d_model = q_in.rows();
    if (d_model % num_heads != 0)
        throw ContractError("attention: d_model not divisible by num_heads");
    if (k_in.rows() != d_model || v_in.rows() != d_model ||
        k_in.cols() != v_in.cols())
        throw ShapeError("attention: inconsistent key/value shapes");
    const std::size_t d_head = d_model / num_heads;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d_head));

    Tensor mask;
    if (causal) {
        if (q_in.cols() != k_in.cols())
            throw ContractError("attention: causal mask needs query len == key len");
        mask = causal_mask(q_in.cols());
    }

    std::vector<Tensor> heads;
    heads.reserve(num_heads);
    for (std::size_t h = 0; h < num_heads; ++h) {
        const Tensor q = matmul(params.wq[h], q_in);  // d_head x sq
        const Tensor k = matmul(params.wk[h], k_in);  // d_head x sk
        const Tensor v = matmul(params.wv[h], v_in);  // d_head x sk
        Tensor scores = scale(matmul(transpose(q), k), inv_sqrt);  // sq x sk
        if (causal) scores = add(scores, mask);
        const Tensor attn = softmax_rows(scores);
        heads.push_back(matmul(v, transpose(attn)));  // d_head x sq
    }
    const Tensor joined = concat_rows(heads);  // d_model x sq
    return add(matmul(params.wo, joined), params.bo);
}

TransformerParams make_transformer(const TransformerConfig& config,
                                   std::size_t input_size, Rng& rng) {
    if (config.d_model % config.num_heads != 0)
        throw ConfigError("transformer: d_model must be divisible by num_heads");
    if (config.d_model % 2 != 0)
        throw ConfigError("transformer: d_model must be even");
    TransformerParams tp;
    tp.config = config;
    tp.input_size = input_size;
    const std::size_t d = config.d_model;
    tp.input_proj = uniform_matrix(d, input_size, rng);
    tp.input_proj_bias = Tensor::zeros(d, 1, true);
    tp.target_proj = uniform_matrix(d, 1, rng);
    tp.target_proj_bias = Tensor::zeros(d, 1, true);
    for (std::size_t l = 0; l < config.num_encoder_layers; ++l) {
        TransformerParams::EncoderLayer layer;
        layer.self_attn = make_attention(d, config.num_heads, rng);
        layer.ln1 = make_layer_norm(d);
        layer.ln2 = make_layer_norm(d);
        layer.ff_w1 = uniform_matrix(config.feedforward_size, d, rng);
        layer.ff_b1 = Tensor::zeros(config.feedforward_size, 1, true);
        layer.ff_w2 = uniform_matrix(d, config.feedforward_size, rng);
        layer.ff_b2 = Tensor::zeros(d, 1, true);
        tp.encoder.push_back(std::move(layer));
    }
    for (std::size_t l = 0; l < config.num_decoder_layers; ++l) {
        TransformerParams::DecoderLayer layer;
        layer.self_attn = make_attention(d, config.num_heads, rng);
        layer.cross_attn = make_attention(d, config.num_heads, rng);
        layer.ln1 = make_layer_norm(d);
        layer.ln2 = make_layer_norm(d);
        layer.ln3 = make_layer_norm(d);
        layer.ff_w1 = uniform_matrix(config.feedforward_size, d, rng);
        layer.ff_b1 = Tensor::zeros(config.feedforward_size, 1, true);
        layer.ff_w2 = uniform_matrix(d, config.feedforward_size, rng);
        layer.ff_b2 = Tensor::zeros(d, 1, true);
        tp.decoder.push_back(std::move(layer));
    }
    tp.encoder_norm = make_layer_norm(d);
    tp.decoder_norm = make_layer_norm(d);
    tp.output_proj = uniform_matrix(1, d, rng);
    tp.output_bias = Tensor::zeros(1, 1, true);
    return tp;
}

Tensor transformer_forward(const TransformerParams& params, const Tensor& window,
                           double start_value, std::size_t horizon, DecodeMode mode,
                           std::span<const double> future_targets, Rng* dropout_rng) {
    if (window.rows() != params.input_size)
        throw ShapeError("transformer: window has " + std::to_string(window.rows()) +
                         " feature rows, expected " + std::to_string(params.input_size));
    if (horizon < 1) throw ContractError("transformer: horizon must be >= 1");
    if (mode == DecodeMode::teacher_forced && future_targets.size() != horizon)
        throw ContractError("transformer: teacher forcing needs the k future targets");

    const Tensor memory = encode(params, window, dropout_rng);

    if (mode == DecodeMode::teacher_forced) {
        std::vector<double> tokens(horizon);
        tokens[0] = start_value;
        for (std::size_t j = 1; j < horizon; ++j) tokens[j] = future_targets[j - 1];
        return decode(params, memory, tokens, dropout_rng);
    }

    // Autoregressive: grow the token sequence with each predicted value.
    std::vector<double> tokens{start_value};
    std::vector<double> outputs(horizon);
    Tensor last;
    for (std::size_t j = 0; j < horizon; ++j) {
        last = decode(params, memory, tokens, dropout_rng);
        outputs[j] = last.at(0, tokens.size() - 1);
        if (j + 1 < horizon) tokens.push_back(outputs[j]);
    }
    if (horizon == 1) return last;  // keep the k=1 graphs identical across modes
    return Tensor::from_data(std::move(outputs), 1, horizon);
}

}  // namespace tsf
