#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

#include "tsf/rng.hpp"

namespace tsf {

namespace detail {

struct Node {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> value;
    std::vector<double> grad;  // allocated on first use, same shape as value
    bool requires_grad = false;
    bool is_leaf = true;
    bool backward_spent = false;
    std::vector<std::shared_ptr<Node>> inputs;
    // Pulls this node's grad into the inputs' grads (+=).
    std::function<void(Node&)> backprop;

    std::size_t size() const { return rows * cols; }
    void ensure_grad() {
        if (grad.empty()) grad.assign(value.size(), 0.0);
    }
};

/// While one of these is alive on a thread, newly built ops do not record
/// graph edges; forwards run value-only.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;
};

bool grad_enabled();

}  // namespace detail

/// Dense 2-D array of doubles participating in a dynamically built
/// reverse-mode differentiation graph. Copying a Tensor copies the handle,
/// not the storage.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols, bool requires_grad = false);

    static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
    static Tensor full(std::size_t rows, std::size_t cols, double v);
    static Tensor from_data(std::vector<double> data, std::size_t rows, std::size_t cols,
                            bool requires_grad = false);
    static Tensor row(std::initializer_list<double> values);
    static Tensor column(std::initializer_list<double> values);
    /// Uniform(-bound, bound) entries drawn from rng, marked as a trainable leaf.
    static Tensor uniform_init(std::size_t rows, std::size_t cols, double bound, Rng& rng);

    bool defined() const { return node_ != nullptr; }
    std::size_t rows() const { return node_->rows; }
    std::size_t cols() const { return node_->cols; }
    std::size_t size() const { return node_->size(); }

    double at(std::size_t r, std::size_t c) const;
    double& at(std::size_t r, std::size_t c);
    /// Value of a 1x1 tensor.
    double item() const;

    std::span<const double> data() const { return node_->value; }
    std::span<double> mutable_data() { return node_->value; }

    bool requires_grad() const { return node_->requires_grad; }
    bool has_grad() const { return !node_->grad.empty(); }
    std::span<const double> grad() const;
    std::span<double> mutable_grad();
    void zero_grad();

    std::shared_ptr<detail::Node> node() const { return node_; }
    explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}

private:
    std::shared_ptr<detail::Node> node_;
};

// ---- differentiable operations ----

/// C = A * B. Shapes (m x p) * (p x n) -> (m x n).
Tensor matmul(const Tensor& a, const Tensor& b);

/// Elementwise sum. As the single broadcasting exception, b may be a column
/// vector with a.rows() rows; it is then added to every column of a.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
/// Elementwise (Hadamard) product; equal shapes only.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);

/// Stacks a on top of b; column counts must match.
Tensor concat_rows(const Tensor& a, const Tensor& b);
Tensor concat_rows(const std::vector<Tensor>& parts);
/// Rows [begin, begin+count) of a.
Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t count);
Tensor transpose(const Tensor& a);

/// Row-wise softmax with max subtraction. -inf entries get exact weight 0.
Tensor softmax_rows(const Tensor& a);

/// Sum of all entries, as a 1x1 tensor.
Tensor sum(const Tensor& a);

/// Normalizes every column of a to zero mean / unit variance over its rows,
/// then applies the per-row affine parameters gamma and beta (column vectors).
Tensor layer_norm_cols(const Tensor& a, const Tensor& gamma, const Tensor& beta,
                       double eps = 1e-5);

/// Inverted dropout; keep probability 1-rate, kept entries scaled by
/// 1/(1-rate). rate = 0 returns a unchanged.
Tensor dropout(const Tensor& a, double rate, Rng& rng);

/// Runs reverse-mode accumulation from a 1x1 loss. Gradients add (+=) into
/// every reachable leaf that requires grad. Interior graph edges are released
/// afterwards; calling backward twice on the same loss is an error.
void backward(const Tensor& loss);

}  // namespace tsf
