#include "tsf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "tsf/error.hpp"
#include "tsf/rng.hpp"
#include "tsf/serialize.hpp"

namespace tsf {

namespace fs = std::filesystem;

namespace {

const std::size_t kPaperWindows[] = {24, 48, 96, 192, 384};

/// Prefixes the stage name while keeping the exception type, so the CLI can
/// still map error kinds to exit codes.
[[noreturn]] void rethrow_with_stage(const std::string& stage) {
    const std::string prefix = "stage " + stage + ": ";
    try {
        throw;
    } catch (const DivergedError& e) {
        throw DivergedError(e.epoch, e.batch, prefix + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const ParseError& e) {
        throw ParseError(prefix + e.what());
    } catch (const SchemaError& e) {
        throw SchemaError(prefix + e.what());
    } catch (const ShapeError& e) {
        throw ShapeError(prefix + e.what());
    } catch (const ContractError& e) {
        throw ContractError(prefix + e.what());
    } catch (const DataError& e) {
        throw DataError(prefix + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(prefix + e.what());
    }
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct ManifestInfo {
    std::string status = "incomplete";
    std::string stage;
    std::size_t dropped_rows = 0, gap_count = 0;
    std::size_t table_windows = 0, train_windows = 0, test_windows = 0;
    bool counts_known = false;
    std::optional<MetricsReport> metrics;
    std::vector<std::string> artifacts;
};

void write_manifest(const ExperimentConfig& config, const ManifestInfo& info,
                    const fs::path& dir) {
    std::ofstream out(dir / "manifest.ini");
    out << "# tsf experiment manifest; the key = value body below is a valid\n"
           "# config file, so `tsf run manifest.ini` reproduces this run.\n";
    out << "# status = " << info.status << "\n";
    if (!info.stage.empty()) out << "# failed_stage = " << info.stage << "\n";
    if (info.counts_known) {
        out << "# dropped_rows = " << info.dropped_rows << "\n";
        out << "# gap_count = " << info.gap_count << "\n";
        out << "# table_windows = " << info.table_windows << "\n";
        out << "# train_windows = " << info.train_windows << "\n";
        out << "# test_windows = " << info.test_windows << "\n";
    }
    if (info.metrics) {
        out << "# mae = " << format_double(info.metrics->mae) << "\n";
        out << "# rmse = " << format_double(info.metrics->rmse) << "\n";
        out << "# config_hash = " << info.metrics->config_hash << "\n";
    }
    for (const auto& a : info.artifacts) out << "# artifact = " << a << "\n";
    out << "\n" << serialize_config(config);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.k_hours < 1) throw ConfigError("k_hours must be >= 1");
    if (config.w_hours < 1) throw ConfigError("w_hours must be >= 1");
    if (std::find(std::begin(kPaperWindows), std::end(kPaperWindows), config.w_hours) ==
        std::end(kPaperWindows)) {
        std::cerr << "warning: w_hours = " << config.w_hours
                  << " is outside the usual set {24, 48, 96, 192, 384}\n";
    }

    const fs::path dir = resolve_output_dir(config);
    fs::create_directories(dir);
    ManifestInfo info;
    ExperimentResult result;
    result.dir = dir;

    try {
        // ingest
        BuildResult built;
        try {
            std::ifstream in(config.data_csv);
            if (!in) throw DataError("cannot open data file '" + config.data_csv + "'");
            const auto records = parse_raw_csv(in);
            built = build_feature_table(records, config.features);
        } catch (...) {
            rethrow_with_stage("ingest");
        }
        result.dropped_rows = built.dropped_rows;
        result.gap_count = built.gap_count;

        // split
        FeatureTable train_raw, test_raw;
        try {
            std::tie(train_raw, test_raw) =
                chrono_split(built.table, config.split_fraction);
        } catch (...) {
            rethrow_with_stage("split");
        }

        // scale
        Scaler scaler;
        FeatureTable train_scaled, test_scaled;
        try {
            scaler = config.scaler_scope == ScalerScope::train ? fit_minmax(train_raw)
                                                               : fit_minmax(built.table);
            train_scaled = apply_scale(scaler, train_raw);
            test_scaled = apply_scale(scaler, test_raw);
        } catch (...) {
            rethrow_with_stage("scale");
        }

        // window
        WindowedDataset train_ds, test_ds;
        try {
            train_ds = WindowedDataset::build(train_scaled, config.w_hours,
                                              config.k_hours, config.strict_gaps);
            test_ds = WindowedDataset::build(test_scaled, config.w_hours, config.k_hours,
                                             config.strict_gaps);
        } catch (...) {
            rethrow_with_stage("window");
        }
        const std::size_t total_rows = built.table.num_rows();
        result.table_windows = total_rows < config.w_hours + config.k_hours
                                   ? 0
                                   : total_rows - config.w_hours - config.k_hours + 1;
        result.train_windows = train_ds.size();
        result.test_windows = test_ds.size();
        info.counts_known = true;
        info.dropped_rows = result.dropped_rows;
        info.gap_count = result.gap_count;
        info.table_windows = result.table_windows;
        info.train_windows = result.train_windows;
        info.test_windows = result.test_windows;

        // train
        std::unique_ptr<Forecaster> model;
        try {
            model = make_forecaster(config.model, built.table.num_cols(),
                                    config.w_hours, config.k_hours, config.train.seed);
            result.curves = fit(*model, train_ds, test_ds, config.train);
        } catch (...) {
            rethrow_with_stage("train");
        }

        // evaluate
        PredictionSeries series;
        try {
            std::tie(result.metrics, series) = evaluate(
                *model, test_ds, scaler, config.train.seed, config_hash(config));
        } catch (...) {
            rethrow_with_stage("evaluate");
        }
        info.metrics = result.metrics;

        // write artifacts
        try {
            {
                std::ofstream out(dir / "metrics.csv");
                out << kMetricsCsvHeader << '\n';
                write_metrics_row(result.metrics, out);
            }
            info.artifacts.push_back("metrics.csv");
            {
                std::ofstream out(dir / "series.csv");
                write_series_csv(series, out);
            }
            info.artifacts.push_back("series.csv");
            {
                std::ofstream out(dir / "loss_curves.csv");
                write_loss_curves_csv(result.curves, out);
            }
            info.artifacts.push_back("loss_curves.csv");
            {
                std::ofstream out(dir / "model.json");
                save_trained_model(snapshot_model(*model, config.model, config.features,
                                                  scaler, config.train.seed),
                                   out);
            }
            info.artifacts.push_back("model.json");
        } catch (...) {
            rethrow_with_stage("write");
        }
    } catch (const std::exception& e) {
        info.status = "failed";
        if (info.stage.empty()) {
            // stage name is at the front of the message: "stage X: ..."
            const std::string msg = e.what();
            if (msg.rfind("stage ", 0) == 0) {
                const auto colon = msg.find(':');
                info.stage = msg.substr(6, colon == std::string::npos ? std::string::npos
                                                                      : colon - 6);
            }
        }
        write_manifest(config, info, dir);
        throw;
    }

    info.status = "complete";
    write_manifest(config, info, dir);
    return result;
}

std::string min_marker(const std::vector<std::pair<std::string, double>>& row) {
    std::string best;
    double best_value = std::numeric_limits<double>::infinity();
    for (const auto& [model, value] : row) {
        if (value < best_value) {
            best_value = value;
            best = model;
        }
    }
    return best;
}

namespace {

std::string cell_label(ModelKind model, std::size_t w, std::size_t k) {
    return to_string(model) + "_w" + std::to_string(w) + "_k" + std::to_string(k);
}

void write_pivot(const GridResult& grid, const std::vector<ModelKind>& models,
                 const std::vector<std::size_t>& axis_values, bool axis_is_k,
                 std::size_t fixed_value, const fs::path& file) {
    std::ofstream out(file);
    out << (axis_is_k ? "k_hours" : "w_hours");
    for (const auto m : models) out << ",mae_" << to_string(m) << ",rmse_" << to_string(m);
    out << ",min_mae_model,min_rmse_model\n";
    for (const std::size_t v : axis_values) {
        out << v;
        std::vector<std::pair<std::string, double>> maes, rmses;
        for (const auto m : models) {
            const auto it = std::find_if(
                grid.cells.begin(), grid.cells.end(), [&](const GridCell& c) {
                    return c.model == m && c.w_hours == (axis_is_k ? fixed_value : v) &&
                           c.k_hours == (axis_is_k ? v : fixed_value);
                });
            if (it != grid.cells.end() && it->metrics) {
                out << ',' << format_double(it->metrics->mae) << ','
                    << format_double(it->metrics->rmse);
                maes.emplace_back(to_string(m), it->metrics->mae);
                rmses.emplace_back(to_string(m), it->metrics->rmse);
            } else {
                out << ",,";
            }
        }
        out << ',' << min_marker(maes) << ',' << min_marker(rmses) << '\n';
    }
}

}  // namespace

GridResult run_grid(const ExperimentConfig& base) {
    const GridAxes& axes = base.grid;
    if (axes.models.empty() || axes.w_hours.empty() || axes.k_hours.empty())
        throw ConfigError("grid: models, w_hours and k_hours must all be non-empty");

    const fs::path dir = resolve_output_dir(base);
    fs::create_directories(dir);

    GridResult result;
    for (const auto model : axes.models)
        for (const auto w : axes.w_hours)
            for (const auto k : axes.k_hours)
                result.cells.push_back({model, w, k, "pending", std::nullopt});

    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::max<std::size_t>(1, axes.workers);
    auto run_cells = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= result.cells.size()) break;
            GridCell& cell = result.cells[i];
            ExperimentConfig cfg = base;
            cfg.grid = GridAxes{};
            cfg.model.kind = cell.model;
            cfg.w_hours = cell.w_hours;
            cfg.k_hours = cell.k_hours;
            const std::string label = cell_label(cell.model, cell.w_hours, cell.k_hours);
            cfg.train.seed = derive_seed(base.train.seed, label);
            cfg.output_dir = (dir / "grid" / label).string();
            try {
                cell.metrics = run_experiment(cfg).metrics;
                cell.status = "ok";
            } catch (const std::exception& e) {
                cell.status = std::string("failed: ") + e.what();
            }
        }
    };
    if (workers == 1) {
        run_cells();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(run_cells);
        for (auto& t : pool) t.join();
    }

    result.results_csv = dir / "results.csv";
    {
        std::ofstream out(result.results_csv);
        out << kMetricsCsvHeader << ",status\n";
        for (const auto& cell : result.cells) {
            if (cell.metrics) {
                out << cell.metrics->model << ',' << cell.metrics->w_hours << ','
                    << cell.metrics->k_hours << ',' << format_double(cell.metrics->mae)
                    << ',' << format_double(cell.metrics->rmse) << ','
                    << cell.metrics->n_samples << ',' << cell.metrics->seed << ','
                    << cell.metrics->config_hash;
            } else {
                out << to_string(cell.model) << ',' << cell.w_hours << ','
                    << cell.k_hours << ",,,,,";
            }
            // embedded commas would break the csv
            std::string status = cell.status;
            std::replace(status.begin(), status.end(), ',', ';');
            out << ',' << status << '\n';
        }
    }

    for (const std::size_t w : axes.w_hours)
        write_pivot(result, axes.models, axes.k_hours, true, w,
                    dir / ("by_k_w" + std::to_string(w) + ".csv"));
    for (const std::size_t k : axes.k_hours)
        write_pivot(result, axes.models, axes.w_hours, false, k,
                    dir / ("by_w_k" + std::to_string(k) + ".csv"));

    return result;
}

}  // namespace tsf
