#include "tsf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>
#include <utility>

#include "tsf/error.hpp"
#include "tsf/kernels.hpp"

namespace tsf {

using detail::Node;

namespace {

thread_local int no_grad_depth = 0;

std::string shape_str(std::size_t r, std::size_t c) {
    return "(" + std::to_string(r) + "x" + std::to_string(c) + ")";
}

std::string shape_str(const Node& n) { return shape_str(n.rows, n.cols); }

std::shared_ptr<Node> make_node(std::size_t rows, std::size_t cols) {
    auto n = std::make_shared<Node>();
    n->rows = rows;
    n->cols = cols;
    n->value.resize(rows * cols);
    return n;
}

/// Attaches graph edges when grad mode is on and any input needs them.
Tensor finish_op(std::shared_ptr<Node> out,
                 std::vector<std::shared_ptr<Node>> inputs,
                 std::function<void(Node&)> backprop) {
    bool needed = false;
    if (detail::grad_enabled()) {
        for (const auto& in : inputs)
            if (in->requires_grad) needed = true;
    }
    if (needed) {
        out->requires_grad = true;
        out->is_leaf = false;
        out->inputs = std::move(inputs);
        out->backprop = std::move(backprop);
    }
    return Tensor(std::move(out));
}

void accumulate(Node& dst, const double* g, std::size_t n) {
    dst.ensure_grad();
    kernels::active().add(dst.grad.data(), g, dst.grad.data(), n);
}

}  // namespace

namespace detail {

NoGradGuard::NoGradGuard() { ++no_grad_depth; }
NoGradGuard::~NoGradGuard() { --no_grad_depth; }
bool grad_enabled() { return no_grad_depth == 0; }

}  // namespace detail

// ---- Tensor basics ----

Tensor::Tensor(std::size_t rows, std::size_t cols, bool requires_grad)
    : node_(make_node(rows, cols)) {
    node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
    return Tensor(rows, cols, requires_grad);
}

Tensor Tensor::full(std::size_t rows, std::size_t cols, double v) {
    Tensor t(rows, cols);
    std::fill(t.node_->value.begin(), t.node_->value.end(), v);
    return t;
}

Tensor Tensor::from_data(std::vector<double> data, std::size_t rows, std::size_t cols,
                         bool requires_grad) {
    if (data.size() != rows * cols)
        throw ShapeError("from_data: " + std::to_string(data.size()) +
                         " values for shape " + shape_str(rows, cols));
    Tensor t(rows, cols, requires_grad);
    t.node_->value = std::move(data);
    return t;
}

Tensor Tensor::row(std::initializer_list<double> values) {
    return from_data(std::vector<double>(values), 1, values.size());
}

Tensor Tensor::column(std::initializer_list<double> values) {
    return from_data(std::vector<double>(values), values.size(), 1);
}

Tensor Tensor::uniform_init(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
    Tensor t(rows, cols, true);
    for (double& v : t.node_->value) v = rng.uniform(-bound, bound);
    return t;
}

double Tensor::at(std::size_t r, std::size_t c) const {
    return node_->value[r * node_->cols + c];
}

double& Tensor::at(std::size_t r, std::size_t c) {
    return node_->value[r * node_->cols + c];
}

double Tensor::item() const {
    if (!node_ || node_->size() != 1)
        throw ContractError("item: tensor is not 1x1");
    return node_->value[0];
}

std::span<const double> Tensor::grad() const {
    if (node_->grad.empty())
        throw ContractError("grad: no gradient present; run backward first");
    return node_->grad;
}

std::span<double> Tensor::mutable_grad() {
    if (node_->grad.empty())
        throw ContractError("grad: no gradient present; run backward first");
    return node_->grad;
}

void Tensor::zero_grad() {
    node_->grad.assign(node_->size(), 0.0);
    node_->backward_spent = false;
}

// ---- operations ----

Tensor matmul(const Tensor& a, const Tensor& b) {
    auto an = a.node(), bn = b.node();
    if (an->cols != bn->rows)
        throw ShapeError("matmul: " + shape_str(*an) + " vs " + shape_str(*bn));
    const std::size_t m = an->rows, p = an->cols, n = bn->cols;
    auto out = make_node(m, n);
    kernels::active().matmul_nn(an->value.data(), bn->value.data(),
                                out->value.data(), m, p, n, false);
    return finish_op(out, {an, bn}, [an, bn, m, p, n](Node& o) {
        if (an->requires_grad) {
            an->ensure_grad();
            kernels::active().matmul_nt(o.grad.data(), bn->value.data(),
                                        an->grad.data(), m, n, p, true);
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            kernels::active().matmul_tn(an->value.data(), o.grad.data(),
                                        bn->grad.data(), p, m, n, true);
        }
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    auto an = a.node(), bn = b.node();
    const bool same = an->rows == bn->rows && an->cols == bn->cols;
    const bool bias = !same && bn->cols == 1 && bn->rows == an->rows;
    if (!same && !bias)
        throw ShapeError("add: " + shape_str(*an) + " vs " + shape_str(*bn));
    auto out = make_node(an->rows, an->cols);
    if (same) {
        kernels::active().add(an->value.data(), bn->value.data(),
                              out->value.data(), an->size());
    } else {
        for (std::size_t i = 0; i < an->rows; ++i) {
            const double bi = bn->value[i];
            const double* arow = an->value.data() + i * an->cols;
            double* orow = out->value.data() + i * an->cols;
            for (std::size_t j = 0; j < an->cols; ++j) orow[j] = arow[j] + bi;
        }
    }
    return finish_op(out, {an, bn}, [an, bn, same](Node& o) {
        if (an->requires_grad) accumulate(*an, o.grad.data(), o.size());
        if (bn->requires_grad) {
            bn->ensure_grad();
            if (same) {
                kernels::active().add(bn->grad.data(), o.grad.data(),
                                      bn->grad.data(), o.size());
            } else {
                for (std::size_t i = 0; i < o.rows; ++i) {
                    const double* grow = o.grad.data() + i * o.cols;
                    double s = 0.0;
                    for (std::size_t j = 0; j < o.cols; ++j) s += grow[j];
                    bn->grad[i] += s;
                }
            }
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    auto an = a.node(), bn = b.node();
    if (an->rows != bn->rows || an->cols != bn->cols)
        throw ShapeError("sub: " + shape_str(*an) + " vs " + shape_str(*bn));
    auto out = make_node(an->rows, an->cols);
    kernels::active().sub(an->value.data(), bn->value.data(), out->value.data(),
                          an->size());
    return finish_op(out, {an, bn}, [an, bn](Node& o) {
        if (an->requires_grad) accumulate(*an, o.grad.data(), o.size());
        if (bn->requires_grad) {
            bn->ensure_grad();
            kernels::active().axpy(-1.0, o.grad.data(), bn->grad.data(), o.size());
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    auto an = a.node(), bn = b.node();
    if (an->rows != bn->rows || an->cols != bn->cols)
        throw ShapeError("mul: " + shape_str(*an) + " vs " + shape_str(*bn));
    auto out = make_node(an->rows, an->cols);
    kernels::active().mul(an->value.data(), bn->value.data(), out->value.data(),
                          an->size());
    return finish_op(out, {an, bn}, [an, bn](Node& o) {
        const std::size_t n = o.size();
        if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t i = 0; i < n; ++i)
                an->grad[i] += o.grad[i] * bn->value[i];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < n; ++i)
                bn->grad[i] += o.grad[i] * an->value[i];
        }
    });
}

Tensor scale(const Tensor& a, double c) {
    auto an = a.node();
    auto out = make_node(an->rows, an->cols);
    kernels::active().scale(an->value.data(), c, out->value.data(), an->size());
    return finish_op(out, {an}, [an, c](Node& o) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        kernels::active().axpy(c, o.grad.data(), an->grad.data(), o.size());
    });
}

Tensor tanh(const Tensor& a) {
    auto an = a.node();
    auto out = make_node(an->rows, an->cols);
    kernels::tanh_v(an->value.data(), out->value.data(), an->size());
    return finish_op(out, {an}, [an](Node& o) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t i = 0; i < o.size(); ++i) {
            const double y = o.value[i];
            an->grad[i] += o.grad[i] * (1.0 - y * y);
        }
    });
}

Tensor sigmoid(const Tensor& a) {
    auto an = a.node();
    auto out = make_node(an->rows, an->cols);
    kernels::sigmoid_v(an->value.data(), out->value.data(), an->size());
    return finish_op(out, {an}, [an](Node& o) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t i = 0; i < o.size(); ++i) {
            const double y = o.value[i];
            an->grad[i] += o.grad[i] * y * (1.0 - y);
        }
    });
}

Tensor relu(const Tensor& a) {
    auto an = a.node();
    auto out = make_node(an->rows, an->cols);
    for (std::size_t i = 0; i < an->size(); ++i)
        out->value[i] = an->value[i] > 0.0 ? an->value[i] : 0.0;
    return finish_op(out, {an}, [an](Node& o) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t i = 0; i < o.size(); ++i)
            if (o.value[i] > 0.0) an->grad[i] += o.grad[i];
    });
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
    return concat_rows(std::vector<Tensor>{a, b});
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ContractError("concat_rows: no inputs");
    const std::size_t cols = parts.front().cols();
    std::size_t rows = 0;
    for (const auto& p : parts) {
        if (p.cols() != cols)
            throw ShapeError("concat_rows: " + shape_str(*parts.front().node()) +
                             " vs " + shape_str(*p.node()));
        rows += p.rows();
    }
    auto out = make_node(rows, cols);
    std::vector<std::shared_ptr<Node>> ins;
    ins.reserve(parts.size());
    std::size_t off = 0;
    for (const auto& p : parts) {
        auto pn = p.node();
        std::copy(pn->value.begin(), pn->value.end(), out->value.begin() + off);
        off += pn->size();
        ins.push_back(std::move(pn));
    }
    auto inputs = ins;
    return finish_op(out, std::move(ins), [inputs](Node& o) {
        std::size_t off = 0;
        for (const auto& in : inputs) {
            if (in->requires_grad) {
                in->ensure_grad();
                kernels::active().add(in->grad.data(), o.grad.data() + off,
                                      in->grad.data(), in->size());
            }
            off += in->size();
        }
    });
}

Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t count) {
    auto an = a.node();
    if (begin + count > an->rows)
        throw ShapeError("slice_rows: rows [" + std::to_string(begin) + "," +
                         std::to_string(begin + count) + ") out of " +
                         std::to_string(an->rows));
    auto out = make_node(count, an->cols);
    const std::size_t off = begin * an->cols;
    std::copy(an->value.begin() + off, an->value.begin() + off + count * an->cols,
              out->value.begin());
    return finish_op(out, {an}, [an, off](Node& o) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        kernels::active().add(an->grad.data() + off, o.grad.data(),
                              an->grad.data() + off, o.size());
    });
}

Tensor transpose(const Tensor& a) {
    auto an = a.node();
    auto out = make_node(an->cols, an->rows);
    for (std::size_t i = 0; i < an->rows; ++i)
        for (std::size_t j = 0; j < an->cols; ++j)
            out->value[j * an->rows + i] = an->value[i * an->cols + j];
    return finish_op(out, {an}, [an](Node& o) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t i = 0; i < o.rows; ++i)
            for (std::size_t j = 0; j < o.cols; ++j)
                an->grad[j * o.rows + i] += o.grad[i * o.cols + j];
    });
}

Tensor softmax_rows(const Tensor& a) {
    auto an = a.node();
    auto out = make_node(an->rows, an->cols);
    const std::size_t c = an->cols;
    for (std::size_t i = 0; i < an->rows; ++i) {
        const double* x = an->value.data() + i * c;
        double* y = out->value.data() + i * c;
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < c; ++j) mx = std::max(mx, x[j]);
        double s = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            y[j] = std::exp(x[j] - mx);
            s += y[j];
        }
        const double inv = 1.0 / s;
        for (std::size_t j = 0; j < c; ++j) y[j] *= inv;
    }
    return finish_op(out, {an}, [an](Node& o) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        const std::size_t c = o.cols;
        for (std::size_t i = 0; i < o.rows; ++i) {
            const double* y = o.value.data() + i * c;
            const double* g = o.grad.data() + i * c;
            double* dx = an->grad.data() + i * c;
            double dot = 0.0;
            for (std::size_t j = 0; j < c; ++j) dot += g[j] * y[j];
            for (std::size_t j = 0; j < c; ++j) dx[j] += y[j] * (g[j] - dot);
        }
    });
}

Tensor sum(const Tensor& a) {
    auto an = a.node();
    auto out = make_node(1, 1);
    double s = 0.0;
    for (double v : an->value) s += v;
    out->value[0] = s;
    return finish_op(out, {an}, [an](Node& o) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        const double g = o.grad[0];
        for (double& d : an->grad) d += g;
    });
}

Tensor layer_norm_cols(const Tensor& a, const Tensor& gamma, const Tensor& beta,
                       double eps) {
    auto an = a.node(), gn = gamma.node(), bn = beta.node();
    if (gn->rows != an->rows || gn->cols != 1 || bn->rows != an->rows || bn->cols != 1)
        throw ShapeError("layer_norm_cols: " + shape_str(*an) + " with gamma " +
                         shape_str(*gn) + ", beta " + shape_str(*bn));
    const std::size_t d = an->rows, c = an->cols;
    auto out = make_node(d, c);
    auto xhat = std::make_shared<std::vector<double>>(d * c);
    auto inv_std = std::make_shared<std::vector<double>>(c);
    for (std::size_t j = 0; j < c; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < d; ++i) mean += an->value[i * c + j];
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double dv = an->value[i * c + j] - mean;
            var += dv * dv;
        }
        var /= static_cast<double>(d);
        const double istd = 1.0 / std::sqrt(var + eps);
        (*inv_std)[j] = istd;
        for (std::size_t i = 0; i < d; ++i) {
            const double xh = (an->value[i * c + j] - mean) * istd;
            (*xhat)[i * c + j] = xh;
            out->value[i * c + j] = gn->value[i] * xh + bn->value[i];
        }
    }
    return finish_op(out, {an, gn, bn}, [an, gn, bn, xhat, inv_std](Node& o) {
        const std::size_t d = o.rows, c = o.cols;
        if (gn->requires_grad) {
            gn->ensure_grad();
            for (std::size_t i = 0; i < d; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < c; ++j)
                    s += o.grad[i * c + j] * (*xhat)[i * c + j];
                gn->grad[i] += s;
            }
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < d; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < c; ++j) s += o.grad[i * c + j];
                bn->grad[i] += s;
            }
        }
        if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t j = 0; j < c; ++j) {
                double mean_dxh = 0.0, mean_dxh_xh = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const double dxh = o.grad[i * c + j] * gn->value[i];
                    mean_dxh += dxh;
                    mean_dxh_xh += dxh * (*xhat)[i * c + j];
                }
                mean_dxh /= static_cast<double>(d);
                mean_dxh_xh /= static_cast<double>(d);
                const double istd = (*inv_std)[j];
                for (std::size_t i = 0; i < d; ++i) {
                    const double dxh = o.grad[i * c + j] * gn->value[i];
                    an->grad[i * c + j] +=
                        istd * (dxh - mean_dxh - (*xhat)[i * c + j] * mean_dxh_xh);
                }
            }
        }
    });
}

Tensor dropout(const Tensor& a, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0)
        throw ContractError("dropout: rate must be in [0, 1)");
    if (rate == 0.0) return a;
    auto an = a.node();
    auto out = make_node(an->rows, an->cols);
    auto mask = std::make_shared<std::vector<double>>(an->size());
    const double keep_scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < an->size(); ++i) {
        (*mask)[i] = rng.uniform() < rate ? 0.0 : keep_scale;
        out->value[i] = an->value[i] * (*mask)[i];
    }
    return finish_op(out, {an}, [an, mask](Node& o) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t i = 0; i < o.size(); ++i)
            an->grad[i] += o.grad[i] * (*mask)[i];
    });
}

// ---- backward ----

void backward(const Tensor& loss) {
    auto root = loss.node();
    if (!root) throw ContractError("backward: undefined tensor");
    if (root->size() != 1)
        throw ContractError("backward: loss must be 1x1, got " + shape_str(*root));
    if (!root->requires_grad)
        throw ContractError("backward: loss does not require grad");
    if (root->backward_spent)
        throw ContractError(
            "backward: already run for this loss; reset grads and rebuild the graph");

    // Reverse DFS post-order gives a topological order (parents first).
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(root.get(), 0);
    visited.insert(root.get());
    while (!stack.empty()) {
        auto& [n, next] = stack.back();
        if (next < n->inputs.size()) {
            Node* child = n->inputs[next++].get();
            if (child->requires_grad && !visited.count(child)) {
                visited.insert(child);
                stack.emplace_back(child, 0);
            }
        } else {
            order.push_back(n);
            stack.pop_back();
        }
    }

    root->ensure_grad();
    root->grad[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backprop) n->backprop(*n);
    }
    root->backward_spent = true;

    // Release interior edges and scratch gradients; leaves keep theirs.
    for (Node* n : order) {
        if (!n->is_leaf) {
            n->inputs.clear();
            n->backprop = nullptr;
            n->grad.clear();
            n->grad.shrink_to_fit();
        }
    }
}

}  // namespace tsf
