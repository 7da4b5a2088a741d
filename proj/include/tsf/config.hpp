#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsf/forecaster.hpp"
#include "tsf/ingest.hpp"
#include "tsf/train.hpp"

namespace tsf {

enum class ScalerScope { train, full };

struct GridAxes {
    std::vector<ModelKind> models;
    std::vector<std::size_t> w_hours;
    std::vector<std::size_t> k_hours;
    std::size_t workers = 1;
};

/// One experiment, fully resolved. The same structure doubles as the grid
/// base configuration; the [grid] section is ignored by single runs.
struct ExperimentConfig {
    std::string data_csv;
    double split_fraction = 0.7;
    ScalerScope scaler_scope = ScalerScope::train;
    FeatureConfig features;
    bool strict_gaps = false;

    ModelConfig model;
    std::size_t w_hours = 24;
    std::size_t k_hours = 1;

    TrainConfig train;

    std::string output_dir;  // empty: $TSF_OUTPUT_DIR, falling back to "out"

    GridAxes grid;
};

/// Parses the plain-text `key = value` format with [section] headers and
/// `#` comments. Unknown sections or keys are errors. Grammar:
///
///   [data]    csv, split_fraction, scaler_scope, cyclical_time, strict_gaps
///   [model]   kind, hidden_size, head, d_model, num_heads, encoder_layers,
///             decoder_layers, feedforward, dropout
///   [window]  w_hours, k_hours
///   [train]   epochs, learning_rate, batch_size, optimizer, beta1, beta2,
///             epsilon, weight_decay, seed, shuffle, grad_clip
///   [output]  dir
///   [grid]    models, w_hours, k_hours, workers   (comma-separated lists)
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config_file(const std::string& path);

/// Canonical serialization; parsing it back yields an equal config.
std::string serialize_config(const ExperimentConfig& config);

/// Fingerprint of the experiment definition (data/model/window/train
/// sections; the output directory does not change the hash).
std::string config_hash(const ExperimentConfig& config);

/// Resolves the effective output directory (config, environment, default).
std::string resolve_output_dir(const ExperimentConfig& config);

}  // namespace tsf
