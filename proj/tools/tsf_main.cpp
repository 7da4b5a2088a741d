// tsf — time-series forecasting harness.
//
// Subcommands:
//   ingest-check <csv>          schema check + dropped-row report
//   run <config>                one experiment from a config file
//   grid <config>               sweep over [grid] axes
//   eval <model.json> <csv>     evaluate a saved model on a data file
//   synth <out.csv>             generate synthetic data in the raw schema
//
// Exit codes: 0 ok, 1 config error, 2 data error, 3 training divergence.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tsf/config.hpp"
#include "tsf/error.hpp"
#include "tsf/eval.hpp"
#include "tsf/experiment.hpp"
#include "tsf/kernels.hpp"
#include "tsf/serialize.hpp"
#include "tsf/synth.hpp"

namespace {

int run_ingest_check(const std::string& csv_path, bool dump_table) {
    std::ifstream in(csv_path);
    if (!in) throw tsf::DataError("cannot open '" + csv_path + "'");
    const auto records = tsf::parse_raw_csv(in);
    const auto built = tsf::build_feature_table(records);
    std::cout << "rows_parsed: " << records.size() << "\n"
              << "rows_dropped_missing_pm25: " << built.dropped_rows << "\n"
              << "rows_kept: " << built.table.num_rows() << "\n"
              << "timestamp_gaps: " << built.gap_count << "\n"
              << "feature_columns: " << built.table.num_cols() << "\n";
    std::cout << "wind_levels:";
    for (const auto& level : built.table.category_levels) std::cout << ' ' << level;
    std::cout << "\ncolumns:";
    for (const auto& name : built.table.column_names) std::cout << ' ' << name;
    std::cout << "\n";
    if (dump_table) tsf::write_feature_table_csv(built.table, std::cout);
    return 0;
}

int run_single(const std::string& config_path, const std::string& out_dir_override,
               int window_days) {
    auto config = tsf::parse_experiment_config_file(config_path);
    if (!out_dir_override.empty()) config.output_dir = out_dir_override;
    if (window_days > 0) config.w_hours = static_cast<std::size_t>(window_days) * 24;
    const auto result = tsf::run_experiment(config);
    std::cout << "model: " << result.metrics.model << "  w: " << result.metrics.w_hours
              << "h  k: " << result.metrics.k_hours << "h\n"
              << "dropped_rows: " << result.dropped_rows << "\n"
              << "windows (table/train/test): " << result.table_windows << "/"
              << result.train_windows << "/" << result.test_windows << "\n"
              << "mae: " << result.metrics.mae << "\n"
              << "rmse: " << result.metrics.rmse << "\n"
              << "artifacts: " << result.dir.string() << "\n";
    return 0;
}

int run_grid_cmd(const std::string& config_path, const std::string& out_dir_override) {
    auto config = tsf::parse_experiment_config_file(config_path);
    if (!out_dir_override.empty()) config.output_dir = out_dir_override;
    const auto result = tsf::run_grid(config);
    std::size_t ok = 0;
    for (const auto& cell : result.cells)
        if (cell.status == "ok") ++ok;
    std::cout << "cells: " << result.cells.size() << " (" << ok << " ok)\n"
              << "results: " << result.results_csv.string() << "\n";
    return 0;
}

int run_eval(const std::string& model_path, const std::string& csv_path,
             const std::string& out_dir_override) {
    std::ifstream model_in(model_path);
    if (!model_in) throw tsf::DataError("cannot open '" + model_path + "'");
    const auto tm = tsf::load_trained_model(model_in);
    auto model = tsf::restore_forecaster(tm);

    std::ifstream data_in(csv_path);
    if (!data_in) throw tsf::DataError("cannot open '" + csv_path + "'");
    const auto records = tsf::parse_raw_csv(data_in);
    const auto built = tsf::build_feature_table(records, tm.features);
    const auto scaled = tsf::apply_scale(tm.scaler, built.table);
    const auto windows = tsf::WindowedDataset::build(scaled, tm.w, tm.k);

    auto [metrics, series] = tsf::evaluate(*model, windows, tm.scaler, tm.init_seed);
    std::cout << tsf::kMetricsCsvHeader << "\n";
    tsf::write_metrics_row(metrics, std::cout);
    if (!out_dir_override.empty()) {
        std::filesystem::create_directories(out_dir_override);
        std::ofstream out(std::filesystem::path(out_dir_override) / "series.csv");
        tsf::write_series_csv(series, out);
    }
    return 0;
}

int run_synth(const std::string& out_path, std::size_t rows, std::uint64_t seed,
              double na_rate) {
    std::ofstream out(out_path);
    if (!out) throw tsf::DataError("cannot open '" + out_path + "' for writing");
    tsf::write_synthetic_raw_csv(out, {rows, seed, na_rate});
    std::cout << "wrote " << rows << " rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-series forecasting harness"};
    app.require_subcommand(1);

    std::string csv_path, config_path, model_path, out_dir;
    bool dump_table = false;
    int window_days = 0;
    std::size_t synth_rows = 2000;
    std::uint64_t synth_seed = 7;
    double synth_na = 0.01;

    auto* ingest = app.add_subcommand("ingest-check", "validate a raw csv");
    ingest->add_option("csv", csv_path, "raw data file")->required();
    ingest->add_flag("--dump", dump_table, "print the encoded feature table");

    auto* run = app.add_subcommand("run", "run one experiment");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out-dir", out_dir, "override the output directory");
    run->add_option("--window-days", window_days, "override w with days * 24 hours");

    auto* grid = app.add_subcommand("grid", "run a (model, w, k) sweep");
    grid->add_option("config", config_path, "config file with a [grid] section")
        ->required();
    grid->add_option("--out-dir", out_dir, "override the output directory");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model");
    eval_cmd->add_option("model", model_path, "model.json from a previous run")
        ->required();
    eval_cmd->add_option("csv", csv_path, "raw data file")->required();
    eval_cmd->add_option("--out-dir", out_dir, "also write series.csv here");

    auto* synth = app.add_subcommand("synth", "write synthetic raw-schema data");
    synth->add_option("out", csv_path, "output csv path")->required();
    synth->add_option("--rows", synth_rows, "row count");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--na-rate", synth_na, "fraction of missing pm2.5 values");

    auto* kernels = app.add_subcommand("kernels", "print the selected kernel backend");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return run_ingest_check(csv_path, dump_table);
        if (run->parsed()) return run_single(config_path, out_dir, window_days);
        if (grid->parsed()) return run_grid_cmd(config_path, out_dir);
        if (eval_cmd->parsed()) return run_eval(model_path, csv_path, out_dir);
        if (synth->parsed()) return run_synth(csv_path, synth_rows, synth_seed, synth_na);
        if (kernels->parsed()) {
            std::cout << tsf::kernels::active().name
                      << (tsf::kernels::avx2_supported() ? " (avx2 available)"
                                                         : " (avx2 unavailable)")
                      << "\n";
            return 0;
        }
    } catch (const tsf::DivergedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const tsf::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const tsf::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tsf::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tsf::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
