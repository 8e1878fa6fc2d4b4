#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "carbcast/csv.hpp"
#include "carbcast/date.hpp"
#include "carbcast/errors.hpp"
#include "carbcast/harness.hpp"
#include "carbcast/importance.hpp"
#include "carbcast/metrics.hpp"
#include "carbcast/panel.hpp"
#include "carbcast/plot.hpp"
#include "carbcast/stats.hpp"
#include "carbcast/strategy.hpp"
#include "carbcast/synth.hpp"
#include "carbcast/version.hpp"

namespace carbcast {

/**
 * Resolved configuration of one end-to-end run. Everything that affects
 * results lives here and is echoed into the run manifest; the worker count
 * is execution detail only and never changes outputs.
 */
struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path outdir = "out";
    std::uint64_t seed = 42;

    std::vector<ModelFamily> families = {ModelFamily::GARCH,     ModelFamily::MA,
                                         ModelFamily::GRU,       ModelFamily::LSTM,
                                         ModelFamily::GARCH_GRU, ModelFamily::GARCH_LSTM};
    std::vector<std::size_t> windows = {5, 10, 20}; // n1 values
    std::size_t days_per_roll = 60;                 // n
    double split = 0.70;
    std::size_t garch_window = 200;
    GarchSpec garch;

    std::size_t hidden_dim = 32;
    double dropout = 0.2;
    double learning_rate = 0.01;
    std::size_t epochs = 150;

    double threshold = 0.02;
    double shortfall = 20000.0;
    double lot_size = 1000.0;
    std::size_t trials = 1000;
    std::size_t strategy_days = 245; // roughly one trading year
    SignalDenominator denominator = SignalDenominator::ForecastPrice;

    bool run_rfe = false;
    std::size_t rfe_target = 19;
    bool run_grid_search = false;
    bool run_importance = true;
    ModelFamily importance_family = ModelFamily::GARCH_GRU;
    bool whole_sample_metrics = false;
    std::vector<VariableCode> features; // empty = the default 19-variable set

    std::size_t workers = 1; // execution detail, excluded from the manifest
};

// Echoes everything that determines results; the output directory and
// worker count are execution details and stay out.
inline nlohmann::json config_to_json(const RunConfig& config) {
    nlohmann::json j;
    j["input"] = config.input.string();
    j["seed"] = config.seed;
    for (ModelFamily f : config.families) j["families"].push_back(std::string(family_name(f)));
    j["windows"] = config.windows;
    j["days_per_roll"] = config.days_per_roll;
    j["split"] = config.split;
    j["garch_window"] = config.garch_window;
    j["garch_orders"] = {config.garch.arch_order, config.garch.garch_order, config.garch.ar_order,
                         config.garch.ma_order};
    j["hidden_dim"] = config.hidden_dim;
    j["dropout"] = config.dropout;
    j["learning_rate"] = config.learning_rate;
    j["epochs"] = config.epochs;
    j["threshold"] = config.threshold;
    j["shortfall"] = config.shortfall;
    j["lot_size"] = config.lot_size;
    j["trials"] = config.trials;
    j["strategy_days"] = config.strategy_days;
    j["denominator"] =
        config.denominator == SignalDenominator::ForecastPrice ? "forecast" : "realized";
    j["run_rfe"] = config.run_rfe;
    j["rfe_target"] = config.rfe_target;
    j["run_grid_search"] = config.run_grid_search;
    j["run_importance"] = config.run_importance;
    j["importance_family"] = std::string(family_name(config.importance_family));
    j["whole_sample_metrics"] = config.whole_sample_metrics;
    nlohmann::json feats = nlohmann::json::array();
    for (VariableCode code : config.features) feats.push_back(std::string(variable_name(code)));
    j["features"] = feats;
    return j;
}

namespace detail {

inline FeatureSet configured_features(const RunConfig& config) {
    if (config.features.empty()) return selected_feature_set();
    FeatureSet f;
    f.inputs = config.features;
    return f;
}

inline RollConfig roll_config(const RunConfig& config, ModelFamily family, std::size_t window) {
    RollConfig rc;
    rc.family = family;
    rc.window = window;
    rc.days_per_roll = config.days_per_roll;
    rc.split = config.split;
    rc.garch_window = config.garch_window;
    rc.garch = config.garch;
    rc.master_seed = config.seed;
    rc.workers = config.workers;
    return rc;
}

inline RnnSpec rnn_template(const RunConfig& config) {
    RnnSpec spec;
    spec.hidden_dim = config.hidden_dim;
    spec.dropout = config.dropout;
    spec.learning_rate = config.learning_rate;
    spec.epochs = config.epochs;
    return spec;
}

} // namespace detail

/// Table-2-shaped diagnostic battery over every panel column: descriptive
/// stats and Jarque-Bera on levels, ADF on levels and first differences,
/// ARCH-LM (12 lags) on first differences.
inline std::string stats_csv(const ObservationPanel& panel) {
    std::string out = "variable,mean,max,min,std,jarque_bera,adf_level,adf_diff,archlm_p\n";
    for (VariableCode code : panel.codes()) {
        const auto& series = panel.column(code);
        const auto d = descriptive(series);
        const auto jb = jarque_bera(series);
        const auto adf_level = adf_test(series);
        const auto diff = transform_series(panel, {TransformKind::FirstDifference, code});
        const auto adf_diff = adf_test(diff);
        const auto lm = arch_lm(diff);
        out += std::string(variable_name(code)) + "," + format_double(d.mean) + "," +
               format_double(d.maximum) + "," + format_double(d.minimum) + "," +
               format_double(d.std_dev) + "," + format_double(jb.statistic) + "," +
               format_double(adf_level.statistic) + "," + format_double(adf_diff.statistic) +
               "," + format_double(*lm.p_value) + "\n";
    }
    return out;
}

/// Result bundle of run_pipeline, kept for callers that post-process.
struct PipelineResult {
    nlohmann::json manifest;
    std::filesystem::path manifest_path;
};

/**
 * The end-to-end run: ingest, diagnostics, GARCH feature, optional feature
 * selection and tuning, rolling forecasts for every configured family and
 * window, evaluation tables, timing signals, iceberg backtests against the
 * random baseline, and series plots. Every artifact lands in
 * config.outdir; the manifest is written last.
 */
inline PipelineResult run_pipeline(const RunConfig& config) {
    namespace fs = std::filesystem;
    if (config.families.empty()) throw ConfigError("pipeline: no model families configured");
    if (config.windows.empty()) throw ConfigError("pipeline: no sliding windows configured");

    fs::create_directories(config.outdir);
    nlohmann::json manifest;
    manifest["tool"] = "carbcast";
    manifest["version"] = CARBCAST_VERSION;
    manifest["config"] = config_to_json(config);
    std::vector<std::string> outputs;

    auto emit = [&](const std::string& name, const std::string& content) {
        write_file_atomic(config.outdir / name, content);
        outputs.push_back(name);
    };

    // ingest
    const ObservationPanel raw = load_panel_auto(config.input);
    const ObservationPanel panel = fill_missing(raw);
    write_panel(panel, config.outdir / "cleaned_panel.csv");
    outputs.push_back("cleaned_panel.csv");
    manifest["panel"] = {{"rows", panel.length()},
                         {"columns", panel.codes().size()},
                         {"first_date", panel.dates().front().to_string()},
                         {"last_date", panel.dates().back().to_string()}};

    // diagnostics
    emit("stats.csv", stats_csv(panel));

    // GARCH forecast feature
    const auto& shea = panel.column(VariableCode::SHEA);
    std::vector<double> gshea;
    ObservationPanel hybrid_panel; // sub-panel carrying the GSHEA column
    if (panel.has_column(VariableCode::GSHEA)) {
        gshea = panel.column(VariableCode::GSHEA);
        hybrid_panel = panel;
    } else {
        if (panel.length() <= config.garch_window)
            throw InsufficientDataError("pipeline: panel shorter than the GARCH window");
        const auto rolling = rolling_garch_price_forecast(shea, config.garch_window, config.garch,
                                                          config.workers);
        gshea = rolling.prices;
        hybrid_panel = panel.slice(config.garch_window, panel.length() - config.garch_window)
                           .with_column(VariableCode::GSHEA, gshea);
    }
    {
        std::string csv = "date,gshea\n";
        const std::size_t offset = panel.length() - gshea.size();
        for (std::size_t i = 0; i < gshea.size(); ++i)
            csv += panel.dates()[offset + i].to_string() + "," + format_double(gshea[i]) + "\n";
        emit("gshea.csv", csv);
    }

    // feature selection
    FeatureSet features = detail::configured_features(config);
    if (config.run_rfe) {
        const auto rfe = recursive_feature_elimination(
            hybrid_panel, detail::roll_config(config, config.importance_family, config.windows[0]),
            detail::rnn_template(config), full_feature_set(), config.rfe_target);
        std::string csv = "order,variable\n";
        for (std::size_t i = 0; i < rfe.eliminated.size(); ++i)
            csv += std::to_string(i + 1) + "," + std::string(variable_name(rfe.eliminated[i])) + "\n";
        emit("rfe.csv", csv);
        features = rfe.selected;
        nlohmann::json kept = nlohmann::json::array();
        for (VariableCode code : features.inputs) kept.push_back(std::string(variable_name(code)));
        manifest["rfe_selected"] = kept;
    }

    // hyperparameter tuning
    RnnSpec rnn = detail::rnn_template(config);
    if (config.run_grid_search) {
        const bool hybrid = is_hybrid(config.importance_family);
        const auto grid = grid_search(hybrid ? hybrid_panel : panel,
                                      detail::roll_config(config, config.importance_family,
                                                          config.windows[0]),
                                      rnn, features);
        std::string csv = "dropout,epochs,learning_rate,tuning_mse\n";
        for (const auto& p : grid.evaluations)
            csv += format_double(p.dropout) + "," + std::to_string(p.epochs) + "," +
                   format_double(p.learning_rate) + "," + format_double(p.tuning_mse) + "\n";
        emit("grid.csv", csv);
        rnn.dropout = grid.best.dropout;
        rnn.epochs = grid.best.epochs;
        rnn.learning_rate = grid.best.learning_rate;
        manifest["grid_best"] = {{"dropout", grid.best.dropout},
                                 {"epochs", grid.best.epochs},
                                 {"learning_rate", grid.best.learning_rate}};
    }

    // rolling forecasts
    struct RunKey {
        ModelFamily family;
        std::size_t window;
    };
    std::vector<RunKey> run_keys;
    for (ModelFamily family : config.families) {
        if (family == ModelFamily::GARCH) {
            run_keys.push_back({family, config.garch_window});
        } else {
            for (std::size_t window : config.windows) run_keys.push_back({family, window});
        }
    }

    std::string forecasts_csv = "model,window,date,pv,rv,segment\n";
    std::map<std::pair<std::string, std::size_t>, std::vector<ForecastRecord>> records_by_key;
    nlohmann::json arithmetic = nlohmann::json::array();
    for (const auto& key : run_keys) {
        const ObservationPanel& base = is_hybrid(key.family) ? hybrid_panel : panel;
        const auto run =
            rolling_run(base, detail::roll_config(config, key.family, key.window), rnn, features);
        const auto body = records_to_csv(run.records, key.window);
        forecasts_csv += body.substr(body.find('\n') + 1);
        records_by_key[{std::string(family_name(key.family)), key.window}] = run.records;
        arithmetic.push_back({{"model", std::string(family_name(key.family))},
                              {"window", key.window},
                              {"usable_days", run.arithmetic.usable_days},
                              {"rolls", run.arithmetic.rolls},
                              {"tuning_rolls", run.arithmetic.tuning_rolls}});
    }
    emit("forecasts.csv", forecasts_csv);
    manifest["rolling"] = arithmetic;

    // evaluation, rows in run order (GARCH first, then per-family windows)
    std::vector<MetricsReport> reports;
    for (const auto& key : run_keys) {
        const auto& records = records_by_key[{std::string(family_name(key.family)), key.window}];
        const auto scored =
            config.whole_sample_metrics ? records : filter_segment(records, Segment::Implementation);
        if (scored.empty()) continue;
        MetricsReport report = compute_metrics(scored);
        report.model_id = std::string(family_name(key.family));
        report.window = key.window;
        reports.push_back(std::move(report));
    }
    emit("comparison.csv", comparison_table(reports).to_csv());

    if (config.run_importance) {
        const bool hybrid = is_hybrid(config.importance_family);
        const auto table = leave_one_out_importance(
            hybrid ? hybrid_panel : panel,
            detail::roll_config(config, config.importance_family, config.windows[0]), rnn,
            features);
        emit("importance.csv", table.to_csv());
    }

    // timing signals + iceberg backtests over the trailing strategy window
    const std::size_t strategy_len = std::min<std::size_t>(config.strategy_days, panel.length());
    const std::size_t strategy_first = panel.length() - strategy_len;
    const Date strategy_start = panel.dates()[strategy_first];
    std::vector<Date> strategy_dates(panel.dates().begin() + strategy_first, panel.dates().end());
    std::vector<double> strategy_prices(shea.begin() + strategy_first, shea.end());

    const auto baseline = random_baseline(strategy_prices, config.trials, config.shortfall,
                                          config.lot_size, Rng(config.seed).derive(777).next_u64());
    {
        std::string csv = "trial,cost\n";
        for (std::size_t i = 0; i < baseline.size(); ++i)
            csv += std::to_string(i) + "," + format_double(baseline[i]) + "\n";
        emit("baseline_costs.csv", csv);
    }
    double baseline_mean = 0.0;
    for (double c : baseline) baseline_mean += c;
    baseline_mean /= static_cast<double>(baseline.size());

    std::string summary = "strategy,window,total_cost,reduction_ratio,relative_quantile,"
                          "forced_completion\n";
    std::string signals_csv = "model,window,date,delta,signal\n";
    for (const auto& key : run_keys) {
        const auto& records = records_by_key[{std::string(family_name(key.family)), key.window}];
        std::vector<ForecastRecord> in_window;
        for (const auto& r : records)
            if (!(r.date < strategy_start)) in_window.push_back(r);
        if (in_window.size() < 2)
            throw InsufficientDataError("pipeline: family " +
                                        std::string(family_name(key.family)) +
                                        " has too few forecasts inside the strategy window");
        const auto signals = generate_signals(in_window, config.threshold, config.denominator);
        for (std::size_t i = 0; i < signals.dates.size(); ++i)
            signals_csv += std::string(family_name(key.family)) + "," + std::to_string(key.window) +
                           "," + signals.dates[i].to_string() + "," +
                           format_double(signals.delta[i]) + "," +
                           std::to_string(signals.signal[i]) + "\n";
        const auto ledger = iceberg_backtest(signals, strategy_dates, strategy_prices,
                                             config.shortfall, config.lot_size);
        const auto eval = evaluate_strategy(ledger, baseline);
        emit("ledger_" + std::string(family_name(key.family)) + "_w" +
                 std::to_string(key.window) + ".csv",
             ledger.to_csv());
        summary += std::string(family_name(key.family)) + "," + std::to_string(key.window) + "," +
                   format_double(eval.total_cost) + "," + format_double(eval.reduction_ratio) +
                   "," + format_double(eval.relative_quantile) + "," +
                   (ledger.forced_completion ? "true" : "false") + "\n";
    }
    summary += "random_mean,," + format_double(baseline_mean) + ",,,\n";
    emit("signals.csv", signals_csv);
    emit("strategy_summary.csv", summary);

    // plots: the price history and one predicted-vs-realized overlay per family
    emit_series_plot(panel.dates(), {shea}, {"SHEA"}, "SHEA closing price",
                     config.outdir / "shea_price.svg");
    outputs.push_back("shea_price.svg");
    outputs.push_back("shea_price.csv");
    for (const auto& key : run_keys) {
        const auto& records = records_by_key[{std::string(family_name(key.family)), key.window}];
        if (records.empty()) continue;
        std::vector<Date> dates;
        std::vector<double> pv, rv;
        for (const auto& r : records) {
            dates.push_back(r.date);
            pv.push_back(r.predicted);
            rv.push_back(r.realized);
        }
        const std::string stem = "pred_vs_realized_" + std::string(family_name(key.family)) +
                                 "_w" + std::to_string(key.window);
        emit_series_plot(dates, {pv, rv}, {"predicted", "realized"},
                         std::string(family_name(key.family)) + " window " +
                             std::to_string(key.window),
                         config.outdir / (stem + ".svg"));
        outputs.push_back(stem + ".svg");
        outputs.push_back(stem + ".csv");
    }

    manifest["outputs"] = outputs;
    PipelineResult result;
    result.manifest = manifest;
    result.manifest_path = config.outdir / "manifest.json";
    write_file_atomic(result.manifest_path, manifest.dump(2) + "\n");
    return result;
}

} // namespace carbcast
