#include <cmath>

#include "tsf/error.hpp"
#include "tsf/models.hpp"

namespace tsf {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::persistence: return "persistence";
        case ModelKind::rnn: return "rnn";
        case ModelKind::lstm: return "lstm";
        case ModelKind::gru: return "gru";
        case ModelKind::transformer: return "transformer";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "persistence") return ModelKind::persistence;
    if (name == "rnn") return ModelKind::rnn;
    if (name == "lstm") return ModelKind::lstm;
    if (name == "gru") return ModelKind::gru;
    if (name == "transformer") return ModelKind::transformer;
    throw ConfigError("unknown model kind '" + name + "'");
}

namespace {

std::size_t gate_count(ModelKind kind) {
    switch (kind) {
        case ModelKind::rnn: return 1;
        case ModelKind::lstm: return 4;
        case ModelKind::gru: return 3;
        default: throw ContractError("not a recurrent cell kind: " + to_string(kind));
    }
}

void check_step_shapes(const RecurrentCellParams& p, const Tensor& x,
                       const Tensor& s_prev) {
    if (x.rows() != p.input_size)
        throw ShapeError("cell step: input has " + std::to_string(x.rows()) +
                         " rows, cell expects " + std::to_string(p.input_size));
    if (s_prev.rows() != p.hidden_size || s_prev.cols() != x.cols())
        throw ShapeError("cell step: state (" + std::to_string(s_prev.rows()) + "x" +
                         std::to_string(s_prev.cols()) + ") does not match input batch");
}

}  // namespace

RecurrentCellParams make_recurrent_cell(ModelKind kind, std::size_t input_size,
                                        std::size_t hidden_size, Rng& rng) {
    RecurrentCellParams p;
    p.kind = kind;
    p.input_size = input_size;
    p.hidden_size = hidden_size;
    const std::size_t fan_in = input_size + hidden_size;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t g = 0; g < gate_count(kind); ++g) {
        p.weights.push_back(Tensor::uniform_init(hidden_size, fan_in, bound, rng));
        p.biases.push_back(Tensor::zeros(hidden_size, 1, true));
    }
    return p;
}

OutputHead make_output_head(std::size_t hidden_size, HeadActivation activation, Rng& rng) {
    OutputHead head;
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    head.weight = Tensor::uniform_init(1, hidden_size, bound, rng);
    head.bias = Tensor::zeros(1, 1, true);
    head.activation = activation;
    return head;
}

Tensor apply_head(const OutputHead& head, const Tensor& state) {
    Tensor y = add(matmul(head.weight, state), head.bias);
    return head.activation == HeadActivation::sigmoid ? sigmoid(y) : y;
}

Tensor rnn_step(const RecurrentCellParams& p, const Tensor& x, const Tensor& s_prev) {
    check_step_shapes(p, x, s_prev);
    const Tensor joint = concat_rows(x, s_prev);
    return tanh(add(matmul(p.weights[0], joint), p.biases[0]));
}

std::pair<Tensor, Tensor> lstm_step(const RecurrentCellParams& p, const Tensor& x,
                                    const Tensor& s_prev, const Tensor& c_prev) {
    check_step_shapes(p, x, s_prev);
    const Tensor joint = concat_rows(x, s_prev);
    const Tensor f = sigmoid(add(matmul(p.weights[0], joint), p.biases[0]));
    const Tensor i = sigmoid(add(matmul(p.weights[1], joint), p.biases[1]));
    const Tensor c_cand = tanh(add(matmul(p.weights[2], joint), p.biases[2]));
    const Tensor o = sigmoid(add(matmul(p.weights[3], joint), p.biases[3]));
    const Tensor c = add(mul(f, c_prev), mul(i, c_cand));
    const Tensor s = mul(tanh(c), o);
    return {s, c};
}

Tensor gru_step(const RecurrentCellParams& p, const Tensor& x, const Tensor& s_prev) {
    check_step_shapes(p, x, s_prev);
    const Tensor joint = concat_rows(x, s_prev);
    const Tensor r = sigmoid(add(matmul(p.weights[0], joint), p.biases[0]));
    const Tensor z = sigmoid(add(matmul(p.weights[1], joint), p.biases[1]));
    // The reset gate scales the previous state before it joins the input.
    const Tensor joint_reset = concat_rows(x, mul(s_prev, r));
    const Tensor s_cand = tanh(add(matmul(p.weights[2], joint_reset), p.biases[2]));
    const Tensor one_minus_z = sub(Tensor::full(z.rows(), z.cols(), 1.0), z);
    return add(mul(one_minus_z, s_prev), mul(z, s_cand));
}

Tensor run_recurrent_batch(const RecurrentCellParams& cell, const OutputHead& head,
                           const std::vector<Tensor>& steps) {
    if (steps.empty()) throw ContractError("run_recurrent: empty window");
    const std::size_t batch = steps.front().cols();
    Tensor s = Tensor::zeros(cell.hidden_size, batch);
    Tensor c = Tensor::zeros(cell.hidden_size, batch);
    for (const Tensor& x : steps) {
        switch (cell.kind) {
            case ModelKind::rnn: s = rnn_step(cell, x, s); break;
            case ModelKind::lstm: std::tie(s, c) = lstm_step(cell, x, s, c); break;
            case ModelKind::gru: s = gru_step(cell, x, s); break;
            default: throw ContractError("not a recurrent cell kind");
        }
    }
    return apply_head(head, s);
}

Tensor run_recurrent(const RecurrentCellParams& cell, const OutputHead& head,
                     const Tensor& window) {
    if (window.rows() != cell.input_size)
        throw ShapeError("run_recurrent: window has " + std::to_string(window.rows()) +
                         " feature rows, cell expects " + std::to_string(cell.input_size));
    std::vector<Tensor> steps;
    steps.reserve(window.cols());
    for (std::size_t t = 0; t < window.cols(); ++t) {
        std::vector<double> col(window.rows());
        for (std::size_t f = 0; f < window.rows(); ++f) col[f] = window.at(f, t);
        steps.push_back(Tensor::from_data(std::move(col), window.rows(), 1));
    }
    return run_recurrent_batch(cell, head, steps);
}

double persistence_forecast(std::span<const double> window_target, std::size_t) {
    if (window_target.empty()) throw ContractError("persistence: empty window");
    return window_target.back();
}

}  // namespace tsf
