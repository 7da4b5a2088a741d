#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "tsf/forecaster.hpp"
#include "tsf/tensor.hpp"

namespace tsf {

enum class OptimizerKind { sgd, adam, adamw };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct TrainConfig {
    std::size_t epochs = 100;
    double learning_rate = 5e-4;
    std::size_t batch_size = 256;
    OptimizerKind optimizer = OptimizerKind::adam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double weight_decay = 0.0;  // applied by adamw only
    std::uint64_t seed = 42;
    bool shuffle = true;
    double grad_clip = 0.0;  // global L2 cap; 0 disables

    bool operator==(const TrainConfig&) const = default;
};

/// Per-epoch mean MSE on the training batches (measured as trained) and on
/// the full test set. Both have one entry per epoch actually run.
struct LossCurves {
    std::vector<double> train_mse;
    std::vector<double> test_mse;
};

/// Mean squared error between equally shaped prediction/label tensors.
Tensor mse_loss(const Tensor& predictions, const Tensor& labels);

/// SGD / Adam / AdamW over a fixed parameter list. Moment state is indexed
/// by parameter position, so the list must be the same on every call.
class Optimizer {
public:
    explicit Optimizer(const TrainConfig& config);
    void step(std::span<Tensor> params);
    std::size_t steps_taken() const { return t_; }

private:
    TrainConfig config_;
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

struct FitOptions {
    /// Called after each epoch; return true to stop early.
    std::function<bool(std::size_t epoch, double train_mse, double test_mse)> stop;
};

/// Seeded mini-batch training loop. Shuffles sample order per epoch, runs
/// forward/backward/step per batch (the last batch may be short), records
/// loss curves. Throws DivergedError on a non-finite loss. Models without
/// parameters (persistence) skip the update and only produce curves.
/// An empty test set records NaN test entries.
LossCurves fit(Forecaster& model, const WindowedDataset& train,
               const WindowedDataset& test, const TrainConfig& config,
               const FitOptions& options = {});

/// CSV export: `epoch,train_mse,test_mse`, epochs 1-based.
void write_loss_curves_csv(const LossCurves& curves, std::ostream& out);

}  // namespace tsf
