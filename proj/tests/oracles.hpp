#pragma once

// Independent straight-line reference implementations used as oracles.
// Everything here is plain double arithmetic on std::vector, with no use of
// the tensor graph or the dispatched kernels.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// W is n x (m+n) row-major; returns W * [x; s] + b.
inline std::vector<double> affine_concat(const std::vector<double>& w,
                                         const std::vector<double>& b,
                                         const std::vector<double>& x,
                                         const std::vector<double>& s) {
    const std::size_t n = b.size();
    const std::size_t m = x.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += w[i * (m + n) + j] * x[j];
        for (std::size_t j = 0; j < n; ++j) acc += w[i * (m + n) + m + j] * s[j];
        out[i] = acc + b[i];
    }
    return out;
}

inline std::vector<double> rnn_step(const std::vector<double>& w_xs,
                                    const std::vector<double>& b_s,
                                    const std::vector<double>& x,
                                    const std::vector<double>& s_prev) {
    auto pre = affine_concat(w_xs, b_s, x, s_prev);
    for (double& v : pre) v = std::tanh(v);
    return pre;
}

struct LstmState {
    std::vector<double> s;
    std::vector<double> c;
};

inline LstmState lstm_step(const std::vector<double>& w_f, const std::vector<double>& b_f,
                           const std::vector<double>& w_i, const std::vector<double>& b_i,
                           const std::vector<double>& w_c, const std::vector<double>& b_c,
                           const std::vector<double>& w_o, const std::vector<double>& b_o,
                           const std::vector<double>& x, const std::vector<double>& s_prev,
                           const std::vector<double>& c_prev) {
    const std::size_t n = s_prev.size();
    const auto f_pre = affine_concat(w_f, b_f, x, s_prev);
    const auto i_pre = affine_concat(w_i, b_i, x, s_prev);
    const auto c_pre = affine_concat(w_c, b_c, x, s_prev);
    const auto o_pre = affine_concat(w_o, b_o, x, s_prev);
    LstmState out{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        const double f = sigmoid(f_pre[j]);
        const double i = sigmoid(i_pre[j]);
        const double c_cand = std::tanh(c_pre[j]);
        const double o = sigmoid(o_pre[j]);
        out.c[j] = f * c_prev[j] + i * c_cand;
        out.s[j] = std::tanh(out.c[j]) * o;
    }
    return out;
}

inline std::vector<double> gru_step(const std::vector<double>& w_r,
                                    const std::vector<double>& b_r,
                                    const std::vector<double>& w_z,
                                    const std::vector<double>& b_z,
                                    const std::vector<double>& w_s,
                                    const std::vector<double>& b_s,
                                    const std::vector<double>& x,
                                    const std::vector<double>& s_prev) {
    const std::size_t n = s_prev.size();
    const auto r_pre = affine_concat(w_r, b_r, x, s_prev);
    const auto z_pre = affine_concat(w_z, b_z, x, s_prev);
    std::vector<double> s_scaled(n);
    for (std::size_t j = 0; j < n; ++j) s_scaled[j] = s_prev[j] * sigmoid(r_pre[j]);
    const auto cand_pre = affine_concat(w_s, b_s, x, s_scaled);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double z = sigmoid(z_pre[j]);
        out[j] = (1.0 - z) * s_prev[j] + z * std::tanh(cand_pre[j]);
    }
    return out;
}

// ---- tiny transformer reference (single head per attention) ----

using Mat = std::vector<std::vector<double>>;  // [rows][cols]

inline std::vector<double> matvec(const Mat& m, const std::vector<double>& v) {
    std::vector<double> out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

inline std::vector<double> vadd(std::vector<double> a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

// Columns are positions; layer norm runs over each column.
inline void layer_norm_inplace(std::vector<std::vector<double>>& cols,
                               const std::vector<double>& gamma,
                               const std::vector<double>& beta, double eps = 1e-5) {
    for (auto& col : cols) {
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(col.size());
        double var = 0.0;
        for (double v : col) var += (v - mean) * (v - mean);
        var /= static_cast<double>(col.size());
        const double istd = 1.0 / std::sqrt(var + eps);
        for (std::size_t i = 0; i < col.size(); ++i)
            col[i] = gamma[i] * (col[i] - mean) * istd + beta[i];
    }
}

struct RefAttention {
    Mat wq, wk, wv, wo;  // single head: d x d
    std::vector<double> bo;
};

// positions[i] is the d-vector at position i. Causal masking skips j > i.
inline std::vector<std::vector<double>> attention(
    const RefAttention& p, const std::vector<std::vector<double>>& queries,
    const std::vector<std::vector<double>>& keys_values, bool causal) {
    const std::size_t d = p.bo.size();
    std::vector<std::vector<double>> q, k, v;
    for (const auto& pos : queries) q.push_back(matvec(p.wq, pos));
    for (const auto& pos : keys_values) {
        k.push_back(matvec(p.wk, pos));
        v.push_back(matvec(p.wv, pos));
    }
    std::vector<std::vector<double>> out;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < q.size(); ++i) {
        const std::size_t reach = causal ? i + 1 : k.size();
        std::vector<double> scores(reach);
        double mx = -1e300;
        for (std::size_t j = 0; j < reach; ++j) {
            double dot = 0.0;
            for (std::size_t a = 0; a < d; ++a) dot += q[i][a] * k[j][a];
            scores[j] = dot * inv_sqrt;
            mx = std::max(mx, scores[j]);
        }
        double sum = 0.0;
        for (double& s : scores) {
            s = std::exp(s - mx);
            sum += s;
        }
        std::vector<double> mixed(d, 0.0);
        for (std::size_t j = 0; j < reach; ++j)
            for (std::size_t a = 0; a < d; ++a) mixed[a] += (scores[j] / sum) * v[j][a];
        out.push_back(vadd(matvec(p.wo, mixed), p.bo));
    }
    return out;
}

inline std::vector<double> pe_column(std::size_t pos, std::size_t d) {
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d / 2; ++i) {
        const double rate = std::pow(10000.0, 2.0 * static_cast<double>(i) /
                                                  static_cast<double>(d));
        out[2 * i] = std::sin(static_cast<double>(pos) / rate);
        out[2 * i + 1] = std::cos(static_cast<double>(pos) / rate);
    }
    return out;
}

struct RefFeedForward {
    Mat w1, w2;
    std::vector<double> b1, b2;
};

inline std::vector<double> feed_forward(const RefFeedForward& p,
                                        const std::vector<double>& x) {
    auto h = vadd(matvec(p.w1, x), p.b1);
    for (double& v : h) v = v > 0.0 ? v : 0.0;
    return vadd(matvec(p.w2, h), p.b2);
}

struct RefLayerNorm {
    std::vector<double> gamma, beta;
};

struct RefTransformer {
    std::size_t d = 0;
    Mat input_proj;
    std::vector<double> input_bias;
    std::vector<double> target_proj;  // d x 1
    std::vector<double> target_bias;
    RefAttention enc_self, dec_self, dec_cross;
    RefLayerNorm enc_ln1, enc_ln2, dec_ln1, dec_ln2, dec_ln3, enc_norm, dec_norm;
    RefFeedForward enc_ff, dec_ff;
    std::vector<double> output_proj;  // 1 x d
    double output_bias = 0.0;
};

// window columns are time steps (each an m-vector); one encoder layer and
// one decoder layer, teacher-forced decode over the given tokens.
inline std::vector<double> transformer_forward(
    const RefTransformer& p, const std::vector<std::vector<double>>& window_cols,
    const std::vector<double>& tokens) {
    // encoder
    std::vector<std::vector<double>> e;
    for (std::size_t pos = 0; pos < window_cols.size(); ++pos)
        e.push_back(vadd(vadd(matvec(p.input_proj, window_cols[pos]), p.input_bias),
                         pe_column(pos, p.d)));
    {
        auto a_in = e;
        layer_norm_inplace(a_in, p.enc_ln1.gamma, p.enc_ln1.beta);
        const auto attn = attention(p.enc_self, a_in, a_in, false);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = vadd(e[i], attn[i]);
        auto f_in = e;
        layer_norm_inplace(f_in, p.enc_ln2.gamma, p.enc_ln2.beta);
        for (std::size_t i = 0; i < e.size(); ++i)
            e[i] = vadd(e[i], feed_forward(p.enc_ff, f_in[i]));
    }
    layer_norm_inplace(e, p.enc_norm.gamma, p.enc_norm.beta);

    // decoder
    std::vector<std::vector<double>> dcols;
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        std::vector<double> col(p.d);
        for (std::size_t i = 0; i < p.d; ++i)
            col[i] = p.target_proj[i] * tokens[pos] + p.target_bias[i];
        dcols.push_back(vadd(col, pe_column(pos, p.d)));
    }
    {
        auto a_in = dcols;
        layer_norm_inplace(a_in, p.dec_ln1.gamma, p.dec_ln1.beta);
        const auto self_attn = attention(p.dec_self, a_in, a_in, true);
        for (std::size_t i = 0; i < dcols.size(); ++i)
            dcols[i] = vadd(dcols[i], self_attn[i]);
        auto c_in = dcols;
        layer_norm_inplace(c_in, p.dec_ln2.gamma, p.dec_ln2.beta);
        const auto cross = attention(p.dec_cross, c_in, e, false);
        for (std::size_t i = 0; i < dcols.size(); ++i)
            dcols[i] = vadd(dcols[i], cross[i]);
        auto f_in = dcols;
        layer_norm_inplace(f_in, p.dec_ln3.gamma, p.dec_ln3.beta);
        for (std::size_t i = 0; i < dcols.size(); ++i)
            dcols[i] = vadd(dcols[i], feed_forward(p.dec_ff, f_in[i]));
    }
    layer_norm_inplace(dcols, p.dec_norm.gamma, p.dec_norm.beta);

    std::vector<double> out(dcols.size());
    for (std::size_t i = 0; i < dcols.size(); ++i) {
        double acc = p.output_bias;
        for (std::size_t a = 0; a < p.d; ++a) acc += p.output_proj[a] * dcols[i][a];
        out[i] = acc;
    }
    return out;
}

}  // namespace oracle
