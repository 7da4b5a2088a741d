#include "tsf/train.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "tsf/error.hpp"

namespace tsf {

std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::sgd: return "sgd";
        case OptimizerKind::adam: return "adam";
        case OptimizerKind::adamw: return "adamw";
    }
    return "unknown";
}

OptimizerKind optimizer_from_string(const std::string& name) {
    if (name == "sgd") return OptimizerKind::sgd;
    if (name == "adam") return OptimizerKind::adam;
    if (name == "adamw") return OptimizerKind::adamw;
    throw ConfigError("unknown optimizer '" + name + "'");
}

Tensor mse_loss(const Tensor& predictions, const Tensor& labels) {
    if (predictions.rows() != labels.rows() || predictions.cols() != labels.cols())
        throw ContractError("mse_loss: " + std::to_string(predictions.size()) +
                            " predictions vs " + std::to_string(labels.size()) +
                            " labels");
    if (predictions.size() == 0) throw ContractError("mse_loss: empty inputs");
    const Tensor diff = sub(predictions, labels);
    return scale(sum(mul(diff, diff)), 1.0 / static_cast<double>(predictions.size()));
}

Optimizer::Optimizer(const TrainConfig& config) : config_(config) {}

void Optimizer::step(std::span<Tensor> params) {
    if (m_.empty() && config_.optimizer != OptimizerKind::sgd) {
        m_.resize(params.size());
        v_.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i].assign(params[i].size(), 0.0);
            v_[i].assign(params[i].size(), 0.0);
        }
    }
    ++t_;
    const double lr = config_.learning_rate;
    const double b1 = config_.adam_beta1;
    const double b2 = config_.adam_beta2;
    const double eps = config_.adam_epsilon;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));

    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i].has_grad())
            throw ContractError("optimizer: parameter " + std::to_string(i) +
                                " has no gradient");
        auto value = params[i].mutable_data();
        auto grad = params[i].grad();
        switch (config_.optimizer) {
            case OptimizerKind::sgd:
                for (std::size_t j = 0; j < value.size(); ++j)
                    value[j] -= lr * grad[j];
                break;
            case OptimizerKind::adamw:
                // Decoupled decay, separate from the moment update.
                for (std::size_t j = 0; j < value.size(); ++j)
                    value[j] -= lr * config_.weight_decay * value[j];
                [[fallthrough]];
            case OptimizerKind::adam:
                for (std::size_t j = 0; j < value.size(); ++j) {
                    m_[i][j] = b1 * m_[i][j] + (1.0 - b1) * grad[j];
                    v_[i][j] = b2 * v_[i][j] + (1.0 - b2) * grad[j] * grad[j];
                    const double mhat = m_[i][j] / bc1;
                    const double vhat = v_[i][j] / bc2;
                    value[j] -= lr * mhat / (std::sqrt(vhat) + eps);
                }
                break;
        }
    }
}

namespace {

void validate(const TrainConfig& c) {
    if (c.epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (!(c.learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
    if (c.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
}

void clip_gradients(std::span<Tensor> params, double cap) {
    double sq = 0.0;
    for (Tensor& p : params)
        for (double g : p.grad()) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm <= cap || norm == 0.0) return;
    const double factor = cap / norm;
    for (Tensor& p : params)
        for (double& g : p.mutable_grad()) g *= factor;
}

/// Mean loss over the whole set, evaluated in batch_size chunks,
/// without touching parameters or the dropout stream.
double evaluation_loss(Forecaster& model, const WindowedDataset& ds,
                       std::size_t batch_size) {
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    double sum = 0.0;
    for (std::size_t at = 0; at < idx.size(); at += batch_size) {
        const std::size_t len = std::min(batch_size, idx.size() - at);
        const Tensor loss = model.training_loss(
            ds, std::span<const std::size_t>(idx).subspan(at, len), nullptr);
        sum += loss.item() * static_cast<double>(len);
    }
    return sum / static_cast<double>(idx.size());
}

}  // namespace

LossCurves fit(Forecaster& model, const WindowedDataset& train,
               const WindowedDataset& test, const TrainConfig& config,
               const FitOptions& options) {
    validate(config);
    if (train.empty()) throw DataError("fit: no training windows");

    auto params = model.parameters();
    Optimizer optimizer(config);
    Rng rng(config.seed);
    LossCurves curves;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.shuffle) rng.shuffle(order);
        double running = 0.0;
        std::size_t seen = 0;
        std::size_t batch_index = 0;
        for (std::size_t at = 0; at < order.size(); at += config.batch_size) {
            ++batch_index;
            const std::size_t len = std::min(config.batch_size, order.size() - at);
            const auto idx = std::span<const std::size_t>(order).subspan(at, len);
            for (Tensor& p : params) p.zero_grad();
            const Tensor loss = model.training_loss(train, idx, &rng);
            const double value = loss.item();
            if (!std::isfinite(value))
                throw DivergedError(epoch, batch_index,
                                    "training diverged at epoch " +
                                        std::to_string(epoch) + ", batch " +
                                        std::to_string(batch_index));
            if (!params.empty()) {
                backward(loss);
                if (config.grad_clip > 0.0) clip_gradients(params, config.grad_clip);
                optimizer.step(params);
            }
            running += value * static_cast<double>(len);
            seen += len;
        }
        const double train_mse = running / static_cast<double>(seen);
        const double test_mse =
            test.empty() ? nan : evaluation_loss(model, test, config.batch_size);
        curves.train_mse.push_back(train_mse);
        curves.test_mse.push_back(test_mse);
        if (options.stop && options.stop(epoch, train_mse, test_mse)) break;
    }
    return curves;
}

void write_loss_curves_csv(const LossCurves& curves, std::ostream& out) {
    out << "epoch,train_mse,test_mse\n";
    char buf[32];
    for (std::size_t i = 0; i < curves.train_mse.size(); ++i) {
        out << (i + 1) << ',';
        auto r1 = std::to_chars(buf, buf + sizeof buf, curves.train_mse[i]);
        out.write(buf, r1.ptr - buf);
        out << ',';
        auto r2 = std::to_chars(buf, buf + sizeof buf, curves.test_mse[i]);
        out.write(buf, r2.ptr - buf);
        out << '\n';
    }
}

}  // namespace tsf
