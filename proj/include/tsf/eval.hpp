#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsf/forecaster.hpp"
#include "tsf/pipeline.hpp"

namespace tsf {

double mae(std::span<const double> actual, std::span<const double> predicted);
double rmse(std::span<const double> actual, std::span<const double> predicted);

/// One results row. Errors are in the target's original units.
struct MetricsReport {
    std::string model;
    std::size_t w_hours = 0;
    std::size_t k_hours = 0;
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
};

struct PredictionPoint {
    std::int64_t timestamp = 0;  // epoch hour of the predicted value
    double actual = 0.0;
    double predicted = 0.0;
    double error = 0.0;  // actual - predicted
};

struct PredictionSeries {
    std::vector<PredictionPoint> points;
};

/// Predicts every test window (the transformer autoregressively), de-scales
/// through the training scaler, and reports MAE/RMSE plus the per-timestamp
/// series. seed and config_hash are copied into the report for provenance.
std::pair<MetricsReport, PredictionSeries> evaluate(Forecaster& model,
                                                    const WindowedDataset& test,
                                                    const Scaler& scaler,
                                                    std::uint64_t seed = 0,
                                                    const std::string& config_hash = "");

/// `timestamp,actual,predicted,error` rows, ISO hour timestamps. When a
/// range is given only points with from <= t <= to are written.
void write_series_csv(const PredictionSeries& series, std::ostream& out,
                      std::optional<std::int64_t> from = std::nullopt,
                      std::optional<std::int64_t> to = std::nullopt);

extern const char* const kMetricsCsvHeader;
void write_metrics_row(const MetricsReport& report, std::ostream& out);

}  // namespace tsf
