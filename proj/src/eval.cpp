#include "tsf/eval.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

#include "tsf/error.hpp"
#include "tsf/timeutil.hpp"

namespace tsf {

namespace {

void check_lengths(std::span<const double> actual, std::span<const double> predicted,
                   const char* what) {
    if (actual.size() != predicted.size())
        throw ContractError(std::string(what) + ": " + std::to_string(actual.size()) +
                            " actual vs " + std::to_string(predicted.size()) +
                            " predicted");
    if (actual.empty()) throw ContractError(std::string(what) + ": empty inputs");
}

void write_double(double v, std::ostream& out) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
}

}  // namespace

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual, predicted, "mae");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        sum += std::abs(actual[i] - predicted[i]);
    return sum / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual, predicted, "rmse");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(actual.size()));
}

std::pair<MetricsReport, PredictionSeries> evaluate(Forecaster& model,
                                                    const WindowedDataset& test,
                                                    const Scaler& scaler,
                                                    std::uint64_t seed,
                                                    const std::string& config_hash) {
    if (test.window_size() != model.window_size() || test.horizon() != model.horizon())
        throw ContractError("evaluate: dataset (w,k) does not match the model");
    if (test.empty()) throw DataError("evaluate: no test windows");

    const std::vector<double> scaled_preds = model.predict_all(test);
    std::vector<double> scaled_actual(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) scaled_actual[i] = test.label(i);

    const std::vector<double> predicted = unscale_target(scaler, scaled_preds);
    const std::vector<double> actual = unscale_target(scaler, scaled_actual);

    MetricsReport report;
    report.model = to_string(model.kind());
    report.w_hours = model.window_size();
    report.k_hours = model.horizon();
    report.mae = mae(actual, predicted);
    report.rmse = rmse(actual, predicted);
    report.n_samples = test.size();
    report.seed = seed;
    report.config_hash = config_hash;

    PredictionSeries series;
    series.points.resize(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        series.points[i] = {test.label_timestamp(i), actual[i], predicted[i],
                            actual[i] - predicted[i]};
    }
    return {std::move(report), std::move(series)};
}

void write_series_csv(const PredictionSeries& series, std::ostream& out,
                      std::optional<std::int64_t> from, std::optional<std::int64_t> to) {
    out << "timestamp,actual,predicted,error\n";
    for (const auto& p : series.points) {
        if (from && p.timestamp < *from) continue;
        if (to && p.timestamp > *to) continue;
        out << format_hour_iso(p.timestamp) << ',';
        write_double(p.actual, out);
        out << ',';
        write_double(p.predicted, out);
        out << ',';
        write_double(p.error, out);
        out << '\n';
    }
}

const char* const kMetricsCsvHeader = "model,w_hours,k_hours,mae,rmse,n_samples,seed,config_hash";

void write_metrics_row(const MetricsReport& r, std::ostream& out) {
    out << r.model << ',' << r.w_hours << ',' << r.k_hours << ',';
    write_double(r.mae, out);
    out << ',';
    write_double(r.rmse, out);
    out << ',' << r.n_samples << ',' << r.seed << ',' << r.config_hash << '\n';
}

}  // namespace tsf
