#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "tsf/forecaster.hpp"
#include "tsf/pipeline.hpp"

namespace tsf {

/// Everything needed to reload a fitted model and reproduce its predictions
/// bit for bit: architecture, hyperparameters, named parameter arrays, the
/// training scaler and the (w, k) binding.
struct TrainedModel {
    ModelConfig model;
    FeatureConfig features;
    Scaler scaler;
    std::size_t input_size = 0;
    std::size_t w = 0;
    std::size_t k = 0;
    std::uint64_t init_seed = 0;

    struct Param {
        std::string name;
        std::size_t rows = 0;
        std::size_t cols = 0;
        std::vector<double> data;
    };
    std::vector<Param> params;
};

TrainedModel snapshot_model(Forecaster& model, const ModelConfig& config,
                            const FeatureConfig& features, const Scaler& scaler,
                            std::uint64_t init_seed);

/// Rebuilds a live forecaster with the stored parameter values.
std::unique_ptr<Forecaster> restore_forecaster(const TrainedModel& tm);

void save_trained_model(const TrainedModel& tm, std::ostream& out);
TrainedModel load_trained_model(std::istream& in);

}  // namespace tsf
