// carbcast command-line tool: synthetic data, pipeline stages, and the full
// end-to-end run. Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "carbcast/carbcast.hpp"

namespace {

using namespace carbcast;

std::vector<ModelFamily> parse_families(const std::vector<std::string>& names) {
    std::vector<ModelFamily> out;
    for (const auto& name : names) {
        const auto family = family_from_name(name);
        if (!family) throw ConfigError("unknown model family '" + name + "'");
        out.push_back(*family);
    }
    return out;
}

std::vector<VariableCode> parse_variables(const std::vector<std::string>& names) {
    std::vector<VariableCode> out;
    for (const auto& name : names) {
        const auto code = variable_from_name(name);
        if (!code) throw ConfigError("unknown variable '" + name + "'");
        out.push_back(*code);
    }
    return out;
}

SignalDenominator parse_denominator(const std::string& name) {
    if (name == "forecast") return SignalDenominator::ForecastPrice;
    if (name == "realized") return SignalDenominator::RealizedPrice;
    throw ConfigError("denominator must be 'forecast' or 'realized'");
}

std::vector<ForecastRecord> select_records(const std::vector<StoredRecord>& stored,
                                           const std::string& model, std::size_t window) {
    std::vector<ForecastRecord> out;
    for (const auto& s : stored)
        if (s.record.model_id == model && s.window == window) out.push_back(s.record);
    if (out.empty())
        throw DataError("no forecasts for model '" + model + "' at window " +
                        std::to_string(window));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"carbcast: GARCH-GRU carbon price forecasting and procurement toolkit"};
    app.require_subcommand(1);
    // single structured config file; command-line flags win. Subcommand
    // options live in sections, e.g. [pipeline] garch-window=60
    app.set_config("--config", "", "Configuration file (INI with [subcommand] sections)");

    using namespace carbcast;

    // ---- synth ----
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic 23-variable market panel");
    std::size_t synth_days = 605;
    std::uint64_t synth_seed = 42;
    double synth_missing = 0.0;
    std::string synth_out = "panel.csv";
    synth_cmd->add_option("--days", synth_days, "Number of trading days");
    synth_cmd->add_option("--seed", synth_seed, "Generator seed");
    synth_cmd->add_option("--missing-rate", synth_missing, "Fraction of cells blanked out");
    synth_cmd->add_option("-o,--output", synth_out, "Output CSV path");

    // ---- ingest ----
    auto* ingest_cmd = app.add_subcommand("ingest", "Load, validate and clean a panel CSV");
    std::string ingest_in, ingest_out = "cleaned_panel.csv";
    ingest_cmd->add_option("-i,--input", ingest_in, "Panel CSV")->required();
    ingest_cmd->add_option("-o,--output", ingest_out, "Cleaned panel CSV");

    // ---- stats ----
    auto* stats_cmd = app.add_subcommand("stats", "Descriptive statistics and diagnostic tests");
    std::string stats_in, stats_out = "stats.csv";
    stats_cmd->add_option("-i,--input", stats_in, "Panel CSV")->required();
    stats_cmd->add_option("-o,--output", stats_out, "Stats CSV");

    // ---- fit-garch ----
    auto* fit_cmd = app.add_subcommand("fit-garch", "Fit a GARCH model to one column's log-returns");
    std::string fit_in, fit_out = "garch_fit.csv", fit_column = "SHEA";
    std::size_t fit_p = 1, fit_q = 1, fit_r = 0, fit_m = 0;
    fit_cmd->add_option("-i,--input", fit_in, "Panel CSV")->required();
    fit_cmd->add_option("-o,--output", fit_out, "Fit CSV (parameters + variance path)");
    fit_cmd->add_option("--column", fit_column, "Panel column to fit");
    fit_cmd->add_option("-p,--arch-order", fit_p, "ARCH order p");
    fit_cmd->add_option("-q,--garch-order", fit_q, "GARCH order q");
    fit_cmd->add_option("--ar-order", fit_r, "AR order of the mean");
    fit_cmd->add_option("--ma-order", fit_m, "MA order of the mean");

    // ---- gshea ----
    auto* gshea_cmd = app.add_subcommand("gshea", "Rolling GARCH one-step price forecast of SHEA");
    std::string gshea_in, gshea_out = "gshea.csv";
    std::size_t gshea_window = 200, gshea_workers = 1;
    gshea_cmd->add_option("-i,--input", gshea_in, "Panel CSV")->required();
    gshea_cmd->add_option("-o,--output", gshea_out, "GSHEA CSV (date,gshea)");
    gshea_cmd->add_option("--garch-window", gshea_window, "Rolling estimation window");
    gshea_cmd->add_option("--workers", gshea_workers, "Worker threads");

    // shared rolling options builder
    struct RollOpts {
        std::string family = "GARCH-GRU";
        std::size_t window = 5;
        std::size_t days_per_roll = 60;
        double split = 0.70;
        std::size_t garch_window = 200;
        std::uint64_t seed = 42;
        std::size_t workers = 1;
        std::size_t hidden = 32;
        double dropout = 0.2;
        double lr = 0.01;
        std::size_t epochs = 150;
        std::vector<std::string> features;
    };
    auto add_roll_options = [](CLI::App* cmd, RollOpts& opts) {
        cmd->add_option("--family", opts.family, "Model family");
        cmd->add_option("--window", opts.window, "Sliding time window n1");
        cmd->add_option("-n,--days-per-roll", opts.days_per_roll, "Days per rolling training set");
        cmd->add_option("--split", opts.split, "Tuning fraction of rolls");
        cmd->add_option("--garch-window", opts.garch_window, "GARCH feature estimation window");
        cmd->add_option("--seed", opts.seed, "Master seed");
        cmd->add_option("--workers", opts.workers, "Worker threads");
        cmd->add_option("--hidden", opts.hidden, "Hidden state size");
        cmd->add_option("--dropout", opts.dropout, "Dropout rate");
        cmd->add_option("--lr", opts.lr, "Learning rate");
        cmd->add_option("--epochs", opts.epochs, "Training epochs");
        cmd->add_option("--features", opts.features, "Input variables (default: the selected 19)")
            ->delimiter(',');
    };

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "Rolling retrain-predict loop for one family/window");
    std::string run_in, run_out = "forecasts.csv";
    RollOpts run_opts;
    run_cmd->add_option("-i,--input", run_in, "Panel CSV")->required();
    run_cmd->add_option("-o,--output", run_out, "Forecast records CSV");
    add_roll_options(run_cmd, run_opts);

    // ---- rfe ----
    auto* rfe_cmd = app.add_subcommand("rfe", "Recursive feature elimination");
    std::string rfe_in, rfe_out = "rfe.csv";
    std::size_t rfe_target = 19;
    RollOpts rfe_opts;
    rfe_cmd->add_option("-i,--input", rfe_in, "Panel CSV")->required();
    rfe_cmd->add_option("-o,--output", rfe_out, "Elimination order CSV");
    rfe_cmd->add_option("--target-count", rfe_target, "Input variables to keep");
    add_roll_options(rfe_cmd, rfe_opts);

    // ---- evaluate ----
    auto* eval_cmd = app.add_subcommand("evaluate", "Error metrics and model comparison table");
    std::string eval_forecasts, eval_out = "comparison.csv";
    bool eval_whole = false;
    eval_cmd->add_option("-f,--forecasts", eval_forecasts, "forecasts.csv from 'run' or 'pipeline'")
        ->required();
    eval_cmd->add_option("-o,--output", eval_out, "Comparison CSV");
    eval_cmd->add_flag("--whole-sample", eval_whole, "Score all records, not only implementation");

    // ---- importance ----
    auto* imp_cmd = app.add_subcommand("importance", "Leave-one-out variable importance");
    std::string imp_in, imp_out = "importance.csv";
    RollOpts imp_opts;
    imp_cmd->add_option("-i,--input", imp_in, "Panel CSV")->required();
    imp_cmd->add_option("-o,--output", imp_out, "Importance CSV");
    add_roll_options(imp_cmd, imp_opts);

    // ---- signals ----
    auto* sig_cmd = app.add_subcommand("signals", "Timing signals from forecast records");
    std::string sig_forecasts, sig_out = "signals.csv", sig_model = "GARCH-GRU";
    std::string sig_denominator = "forecast";
    std::size_t sig_window = 5;
    double sig_threshold = 0.02;
    sig_cmd->add_option("-f,--forecasts", sig_forecasts, "forecasts.csv")->required();
    sig_cmd->add_option("-o,--output", sig_out, "Signals CSV");
    sig_cmd->add_option("--model", sig_model, "Model id to signal from");
    sig_cmd->add_option("--window", sig_window, "Window of the chosen records");
    sig_cmd->add_option("--threshold", sig_threshold, "Buy threshold on the forecast change");
    sig_cmd->add_option("--denominator", sig_denominator, "forecast or realized");

    // ---- backtest ----
    auto* bt_cmd = app.add_subcommand("backtest", "Iceberg-order purchase simulation");
    std::string bt_forecasts, bt_outdir = ".", bt_model = "GARCH-GRU";
    std::string bt_denominator = "forecast";
    std::size_t bt_window = 5, bt_trials = 1000;
    double bt_threshold = 0.02, bt_shortfall = 20000.0, bt_lot = 1000.0;
    std::uint64_t bt_seed = 42;
    bt_cmd->add_option("-f,--forecasts", bt_forecasts, "forecasts.csv")->required();
    bt_cmd->add_option("--outdir", bt_outdir, "Output directory");
    bt_cmd->add_option("--model", bt_model, "Model id to trade on");
    bt_cmd->add_option("--window", bt_window, "Window of the chosen records");
    bt_cmd->add_option("--threshold", bt_threshold, "Buy threshold");
    bt_cmd->add_option("--shortfall", bt_shortfall, "Tons to procure");
    bt_cmd->add_option("--lot", bt_lot, "Tons per transaction");
    bt_cmd->add_option("--trials", bt_trials, "Random baseline trials");
    bt_cmd->add_option("--seed", bt_seed, "Baseline seed");
    bt_cmd->add_option("--denominator", bt_denominator, "forecast or realized");

    // ---- plot ----
    auto* plot_cmd = app.add_subcommand("plot", "Line chart (SVG + companion CSV) of panel columns");
    std::string plot_in, plot_out = "plot.svg", plot_title = "series";
    std::vector<std::string> plot_columns = {"SHEA"};
    plot_cmd->add_option("-i,--input", plot_in, "Panel CSV")->required();
    plot_cmd->add_option("-o,--output", plot_out, "SVG path");
    plot_cmd->add_option("--columns", plot_columns, "Columns to draw")->delimiter(',');
    plot_cmd->add_option("--title", plot_title, "Chart title");

    // ---- pipeline ----
    auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage end to end");
    std::string pipe_in, pipe_outdir = "out";
    std::uint64_t pipe_seed = 42;
    std::vector<std::string> pipe_families = {"GARCH", "MA", "GRU", "LSTM", "GARCH-GRU",
                                              "GARCH-LSTM"};
    std::vector<std::size_t> pipe_windows = {5, 10, 20};
    std::size_t pipe_n = 60, pipe_garch_window = 200, pipe_hidden = 32, pipe_epochs = 150;
    double pipe_split = 0.70, pipe_dropout = 0.2, pipe_lr = 0.01, pipe_threshold = 0.02;
    double pipe_shortfall = 20000.0, pipe_lot = 1000.0;
    std::size_t pipe_trials = 1000, pipe_strategy_days = 245, pipe_workers = 1, pipe_rfe_target = 19;
    bool pipe_rfe = false, pipe_grid = false, pipe_no_importance = false, pipe_whole = false;
    std::string pipe_importance_family = "GARCH-GRU", pipe_denominator = "forecast";
    std::vector<std::string> pipe_features;
    pipe_cmd->add_option("-i,--input", pipe_in, "Panel CSV")->required();
    pipe_cmd->add_option("--outdir", pipe_outdir, "Output directory");
    pipe_cmd->add_option("--seed", pipe_seed, "Master seed");
    pipe_cmd->add_option("--families", pipe_families, "Model families to run")->delimiter(',');
    pipe_cmd->add_option("--windows", pipe_windows, "Sliding windows n1")->delimiter(',');
    pipe_cmd->add_option("-n,--days-per-roll", pipe_n, "Days per rolling training set");
    pipe_cmd->add_option("--split", pipe_split, "Tuning fraction");
    pipe_cmd->add_option("--garch-window", pipe_garch_window, "GARCH estimation window");
    pipe_cmd->add_option("--hidden", pipe_hidden, "Hidden state size");
    pipe_cmd->add_option("--dropout", pipe_dropout, "Dropout rate");
    pipe_cmd->add_option("--lr", pipe_lr, "Learning rate");
    pipe_cmd->add_option("--epochs", pipe_epochs, "Training epochs");
    pipe_cmd->add_option("--threshold", pipe_threshold, "Signal threshold");
    pipe_cmd->add_option("--shortfall", pipe_shortfall, "Tons to procure");
    pipe_cmd->add_option("--lot", pipe_lot, "Tons per transaction");
    pipe_cmd->add_option("--trials", pipe_trials, "Random baseline trials");
    pipe_cmd->add_option("--strategy-days", pipe_strategy_days, "Trailing strategy window length");
    pipe_cmd->add_option("--denominator", pipe_denominator, "Signal denominator: forecast|realized");
    pipe_cmd->add_flag("--rfe", pipe_rfe, "Run recursive feature elimination first");
    pipe_cmd->add_option("--rfe-target", pipe_rfe_target, "Variables kept by RFE");
    pipe_cmd->add_flag("--grid-search", pipe_grid, "Tune hyperparameters on the tuning segment");
    pipe_cmd->add_flag("--no-importance", pipe_no_importance, "Skip leave-one-out importance");
    pipe_cmd->add_option("--importance-family", pipe_importance_family,
                         "Family used for RFE/grid/importance");
    pipe_cmd->add_flag("--whole-sample", pipe_whole, "Score all records, not only implementation");
    pipe_cmd->add_option("--features", pipe_features, "Input variables")->delimiter(',');
    pipe_cmd->add_option("--workers", pipe_workers, "Worker threads (never changes results)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synth_cmd) {
            SynthConfig config;
            config.days = synth_days;
            config.seed = synth_seed;
            config.missing_rate = synth_missing;
            write_panel(synth_panel(config), synth_out);
            std::printf("wrote %s (%zu days)\n", synth_out.c_str(), synth_days);
        } else if (*ingest_cmd) {
            const auto panel = fill_missing(load_panel_auto(ingest_in));
            write_panel(panel, ingest_out);
            std::printf("wrote %s (%zu rows, %zu columns)\n", ingest_out.c_str(), panel.length(),
                        panel.codes().size());
        } else if (*stats_cmd) {
            const auto panel = fill_missing(load_panel_auto(stats_in));
            write_file_atomic(stats_out, stats_csv(panel));
            std::printf("wrote %s\n", stats_out.c_str());
        } else if (*fit_cmd) {
            const auto panel = fill_missing(load_panel_auto(fit_in));
            const auto code = variable_from_name(fit_column);
            if (!code) throw ConfigError("unknown column '" + fit_column + "'");
            const auto returns = transform_series(panel, {TransformKind::LogReturn, *code});
            GarchSpec spec{fit_p, fit_q, fit_r, fit_m};
            const auto fit = fit_garch(returns, spec);
            std::string csv = "parameter,value\n";
            csv += "mean_const," + format_double(fit.params.mean_const) + "\n";
            for (std::size_t i = 0; i < fit.params.ar_coef.size(); ++i)
                csv += "ar" + std::to_string(i + 1) + "," + format_double(fit.params.ar_coef[i]) + "\n";
            for (std::size_t i = 0; i < fit.params.ma_coef.size(); ++i)
                csv += "ma" + std::to_string(i + 1) + "," + format_double(fit.params.ma_coef[i]) + "\n";
            csv += "var_const," + format_double(fit.params.var_const) + "\n";
            for (std::size_t i = 0; i < fit.params.arch_coef.size(); ++i)
                csv += "arch" + std::to_string(i + 1) + "," + format_double(fit.params.arch_coef[i]) +
                       "\n";
            for (std::size_t i = 0; i < fit.params.garch_coef.size(); ++i)
                csv += "garch" + std::to_string(i + 1) + "," +
                       format_double(fit.params.garch_coef[i]) + "\n";
            csv += "loglik," + format_double(fit.loglik) + "\n";
            csv += "converged," + std::string(fit.converged ? "true" : "false") + "\n";
            csv += "iterations," + std::to_string(fit.iterations) + "\n";
            csv += "date,h\n";
            for (std::size_t t = 0; t < fit.h_path.size(); ++t)
                csv += panel.dates()[t + 1].to_string() + "," + format_double(fit.h_path[t]) + "\n";
            write_file_atomic(fit_out, csv);
            std::printf("wrote %s (loglik %.4f, %s)\n", fit_out.c_str(), fit.loglik,
                        fit.converged ? "converged" : "NOT converged");
        } else if (*gshea_cmd) {
            const auto panel = fill_missing(load_panel_auto(gshea_in));
            const auto& prices = panel.column(VariableCode::SHEA);
            const auto rolling =
                rolling_garch_price_forecast(prices, gshea_window, GarchSpec{}, gshea_workers);
            std::string csv = "date,gshea\n";
            for (std::size_t i = 0; i < rolling.prices.size(); ++i)
                csv += panel.dates()[gshea_window + i].to_string() + "," +
                       format_double(rolling.prices[i]) + "\n";
            write_file_atomic(gshea_out, csv);
            std::printf("wrote %s (%zu forecasts)\n", gshea_out.c_str(), rolling.prices.size());
        } else if (*run_cmd || *rfe_cmd || *imp_cmd) {
            const RollOpts& opts = *run_cmd ? run_opts : (*rfe_cmd ? rfe_opts : imp_opts);
            const std::string input = *run_cmd ? run_in : (*rfe_cmd ? rfe_in : imp_in);
            const auto family = family_from_name(opts.family);
            if (!family) throw ConfigError("unknown model family '" + opts.family + "'");

            const auto panel = fill_missing(load_panel_auto(input));
            RollConfig config;
            config.family = *family;
            config.window = opts.window;
            config.days_per_roll = opts.days_per_roll;
            config.split = opts.split;
            config.garch_window = opts.garch_window;
            config.master_seed = opts.seed;
            config.workers = opts.workers;
            RnnSpec rnn;
            rnn.hidden_dim = opts.hidden;
            rnn.dropout = opts.dropout;
            rnn.learning_rate = opts.lr;
            rnn.epochs = opts.epochs;
            FeatureSet features = opts.features.empty()
                                      ? selected_feature_set()
                                      : FeatureSet{parse_variables(opts.features), VariableCode::SHEA};

            if (*run_cmd) {
                const auto result = rolling_run(panel, config, rnn, features);
                write_file_atomic(run_out, records_to_csv(result.records, config.window));
                std::printf("wrote %s (%zu rolls: %zu tuning, %zu implementation)\n",
                            run_out.c_str(), result.arithmetic.rolls,
                            result.arithmetic.tuning_rolls,
                            result.arithmetic.rolls - result.arithmetic.tuning_rolls);
            } else if (*rfe_cmd) {
                const auto start = opts.features.empty() ? full_feature_set()
                                                         : FeatureSet{parse_variables(opts.features),
                                                                      VariableCode::SHEA};
                const auto result =
                    recursive_feature_elimination(panel, config, rnn, start, rfe_target);
                std::string csv = "order,variable\n";
                for (std::size_t i = 0; i < result.eliminated.size(); ++i)
                    csv += std::to_string(i + 1) + "," +
                           std::string(variable_name(result.eliminated[i])) + "\n";
                write_file_atomic(rfe_out, csv);
                std::printf("wrote %s (%zu variables eliminated)\n", rfe_out.c_str(),
                            result.eliminated.size());
            } else {
                const auto table = leave_one_out_importance(panel, config, rnn, features);
                write_file_atomic(imp_out, table.to_csv());
                std::printf("wrote %s (%zu variables ranked)\n", imp_out.c_str(),
                            table.rows.size());
            }
        } else if (*eval_cmd) {
            const auto stored = records_from_csv_lines(read_lines(eval_forecasts));
            std::map<std::pair<std::string, std::size_t>, std::vector<ForecastRecord>> by_key;
            for (const auto& s : stored) by_key[{s.record.model_id, s.window}].push_back(s.record);
            std::vector<MetricsReport> reports;
            for (const auto& [key, records] : by_key) {
                const auto scored =
                    eval_whole ? records : filter_segment(records, Segment::Implementation);
                if (scored.empty()) continue;
                MetricsReport report = compute_metrics(scored);
                report.model_id = key.first;
                report.window = key.second;
                reports.push_back(std::move(report));
            }
            write_file_atomic(eval_out, comparison_table(reports).to_csv());
            std::printf("wrote %s (%zu rows)\n", eval_out.c_str(), reports.size());
        } else if (*sig_cmd) {
            const auto stored = records_from_csv_lines(read_lines(sig_forecasts));
            const auto records = select_records(stored, sig_model, sig_window);
            const auto signals =
                generate_signals(records, sig_threshold, parse_denominator(sig_denominator));
            std::string csv = "date,delta,signal\n";
            for (std::size_t i = 0; i < signals.dates.size(); ++i)
                csv += signals.dates[i].to_string() + "," + format_double(signals.delta[i]) + "," +
                       std::to_string(signals.signal[i]) + "\n";
            write_file_atomic(sig_out, csv);
            std::printf("wrote %s (%zu signals)\n", sig_out.c_str(), signals.dates.size());
        } else if (*bt_cmd) {
            const auto stored = records_from_csv_lines(read_lines(bt_forecasts));
            const auto records = select_records(stored, bt_model, bt_window);
            const auto signals =
                generate_signals(records, bt_threshold, parse_denominator(bt_denominator));
            std::vector<Date> dates;
            std::vector<double> prices;
            for (const auto& r : records) {
                dates.push_back(r.date);
                prices.push_back(r.realized);
            }
            const auto ledger = iceberg_backtest(signals, dates, prices, bt_shortfall, bt_lot);
            const auto baseline = random_baseline(prices, bt_trials, bt_shortfall, bt_lot, bt_seed);
            const auto eval = evaluate_strategy(ledger, baseline);

            const std::filesystem::path outdir = bt_outdir;
            std::filesystem::create_directories(outdir);
            write_file_atomic(outdir / "ledger.csv", ledger.to_csv());
            std::string base_csv = "trial,cost\n";
            for (std::size_t i = 0; i < baseline.size(); ++i)
                base_csv += std::to_string(i) + "," + format_double(baseline[i]) + "\n";
            write_file_atomic(outdir / "baseline_costs.csv", base_csv);
            std::string summary = "strategy,total_cost,reduction_ratio,relative_quantile,"
                                  "forced_completion\n";
            summary += bt_model + "," + format_double(eval.total_cost) + "," +
                       format_double(eval.reduction_ratio) + "," +
                       format_double(eval.relative_quantile) + "," +
                       (ledger.forced_completion ? "true" : "false") + "\n";
            summary += "random_mean," + format_double(eval.baseline_mean_cost) + ",,,\n";
            write_file_atomic(outdir / "strategy_summary.csv", summary);
            std::printf("total cost %.0f, baseline mean %.0f, reduction %.2f%%, quantile %.3f\n",
                        eval.total_cost, eval.baseline_mean_cost, 100.0 * eval.reduction_ratio,
                        eval.relative_quantile);
        } else if (*plot_cmd) {
            const auto panel = fill_missing(load_panel_auto(plot_in));
            std::vector<std::vector<double>> series;
            for (const auto& name : plot_columns) {
                const auto code = variable_from_name(name);
                if (!code) throw ConfigError("unknown column '" + name + "'");
                series.push_back(panel.column(*code));
            }
            emit_series_plot(panel.dates(), series, plot_columns, plot_title, plot_out);
            std::printf("wrote %s\n", plot_out.c_str());
        } else if (*pipe_cmd) {
            RunConfig config;
            config.input = pipe_in;
            config.outdir = pipe_outdir;
            config.seed = pipe_seed;
            config.families = parse_families(pipe_families);
            config.windows = pipe_windows;
            config.days_per_roll = pipe_n;
            config.split = pipe_split;
            config.garch_window = pipe_garch_window;
            config.hidden_dim = pipe_hidden;
            config.dropout = pipe_dropout;
            config.learning_rate = pipe_lr;
            config.epochs = pipe_epochs;
            config.threshold = pipe_threshold;
            config.shortfall = pipe_shortfall;
            config.lot_size = pipe_lot;
            config.trials = pipe_trials;
            config.strategy_days = pipe_strategy_days;
            config.denominator = parse_denominator(pipe_denominator);
            config.run_rfe = pipe_rfe;
            config.rfe_target = pipe_rfe_target;
            config.run_grid_search = pipe_grid;
            config.run_importance = !pipe_no_importance;
            const auto imp_family = family_from_name(pipe_importance_family);
            if (!imp_family)
                throw ConfigError("unknown model family '" + pipe_importance_family + "'");
            config.importance_family = *imp_family;
            config.whole_sample_metrics = pipe_whole;
            config.features = parse_variables(pipe_features);
            config.workers = pipe_workers;
            const auto result = run_pipeline(config);
            std::printf("pipeline complete: %s\n", result.manifest_path.string().c_str());
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
