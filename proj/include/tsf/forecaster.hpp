#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tsf/models.hpp"
#include "tsf/pipeline.hpp"

namespace tsf {

struct ModelConfig {
    ModelKind kind = ModelKind::gru;
    std::size_t hidden_size = 32;  // recurrent cells
    HeadActivation head = HeadActivation::sigmoid;
    TransformerConfig transformer;

    bool operator==(const ModelConfig&) const = default;
};

struct NamedParam {
    std::string name;
    Tensor tensor;
};

/// A model bound to a fixed (w, k), trainable by `fit` and usable for
/// batch prediction. Parameter handles are shared: mutating them through
/// the returned tensors updates the model.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual ModelKind kind() const = 0;
    virtual std::size_t window_size() const = 0;
    virtual std::size_t horizon() const = 0;
    virtual std::size_t input_size() const = 0;
    virtual std::vector<NamedParam> named_parameters() = 0;
    std::vector<Tensor> parameters();

    /// Builds the training graph over the given samples and returns the
    /// scalar MSE loss. The transformer is teacher forced here; dropout_rng
    /// null disables dropout.
    virtual Tensor training_loss(const WindowedDataset& ds,
                                 std::span<const std::size_t> idx,
                                 Rng* dropout_rng) = 0;

    /// Scaled predictions without graph construction. The transformer
    /// decodes autoregressively and reports the horizon-k output.
    virtual std::vector<double> predict(const WindowedDataset& ds,
                                        std::span<const std::size_t> idx) = 0;
    std::vector<double> predict_all(const WindowedDataset& ds);

protected:
    void check_dataset(const WindowedDataset& ds) const;
};

std::unique_ptr<Forecaster> make_forecaster(const ModelConfig& config,
                                            std::size_t input_size, std::size_t w,
                                            std::size_t k, std::uint64_t init_seed);

}  // namespace tsf
