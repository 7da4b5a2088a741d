#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsf/config.hpp"
#include "tsf/eval.hpp"
#include "tsf/train.hpp"

namespace tsf {

struct ExperimentResult {
    MetricsReport metrics;
    LossCurves curves;
    std::size_t dropped_rows = 0;
    std::size_t gap_count = 0;
    std::size_t table_windows = 0;  // windows over the unsplit table
    std::size_t train_windows = 0;
    std::size_t test_windows = 0;
    std::filesystem::path dir;
};

/// Runs ingest -> split -> scale -> window -> fit -> evaluate and writes
/// metrics.csv, series.csv, loss_curves.csv, model.json and manifest.ini
/// into the resolved output directory. Errors carry the failing stage name;
/// a manifest with `# status = failed` is still written when possible.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct GridCell {
    ModelKind model;
    std::size_t w_hours = 0;
    std::size_t k_hours = 0;
    std::string status;  // "ok" or "failed: <reason>"
    std::optional<MetricsReport> metrics;
};

struct GridResult {
    std::vector<GridCell> cells;
    std::filesystem::path results_csv;
};

/// Runs every (model, w, k) cell as an independent experiment with a derived
/// seed, up to grid.workers at a time. Failed cells are recorded and the
/// grid continues. Writes results.csv plus per-slice pivot tables
/// (by_k_w<w>.csv, by_w_k<k>.csv) with per-row minimum-MAE/RMSE markers.
GridResult run_grid(const ExperimentConfig& base);

/// Pivot helper, exposed for tests: returns the model whose value is
/// smallest, or "" when the row is empty.
std::string min_marker(const std::vector<std::pair<std::string, double>>& row);

}  // namespace tsf
