#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carbcast/errors.hpp"
#include "carbcast/garch.hpp"
#include "carbcast/panel.hpp"
#include "carbcast/parallel.hpp"
#include "carbcast/records.hpp"
#include "carbcast/rnn_train.hpp"

namespace carbcast {

/**
 * Rolling-forecast configuration. `window` is the sliding time window of
 * feature rows per sample; `days_per_roll` is the number of panel days one
 * rolling training set spans, so each roll trains on days_per_roll - window
 * samples and predicts exactly the next day.
 */
struct RollConfig {
    ModelFamily family = ModelFamily::GARCH_GRU;
    std::size_t window = 5;          // n1: 5, 10, or 20 by default
    std::size_t days_per_roll = 60;  // n
    double split = 0.70;             // tuning fraction of rolls (prefix)
    std::size_t garch_window = 200;  // estimation window of the GARCH feature
    GarchSpec garch;                 // orders of the GARCH feature model
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;
};

inline void validate_config(const RollConfig& config) {
    if (config.window < 1) throw ConfigError("roll config: window must be >= 1");
    if (!(config.split > 0.0 && config.split < 1.0))
        throw ConfigError("roll config: split must lie in (0,1)");
    if (config.days_per_roll <= config.window)
        throw ConfigError("roll config: days_per_roll must exceed the sliding window");
}

/// Ordered input variables plus the forecast target.
struct FeatureSet {
    std::vector<VariableCode> inputs;
    VariableCode target = VariableCode::SHEA;
};

/// All 23 observed variables as inputs (SHEA history included).
inline FeatureSet full_feature_set() {
    FeatureSet f;
    f.inputs = observed_variables();
    return f;
}

/// The 19-variable set after eliminating FOB, WIRED, SZGY and PM.
inline FeatureSet selected_feature_set() {
    FeatureSet f;
    for (VariableCode code : observed_variables()) {
        if (code == VariableCode::FOB || code == VariableCode::WIRED ||
            code == VariableCode::SZGY || code == VariableCode::PM)
            continue;
        f.inputs.push_back(code);
    }
    return f;
}

/// For hybrids the SHEA history input is replaced by the GARCH forecast
/// column; plain families use the features as given.
inline FeatureSet features_for_family(const FeatureSet& base, ModelFamily family) {
    FeatureSet out = base;
    for (auto& code : out.inputs) {
        if (is_hybrid(family) && code == VariableCode::SHEA) code = VariableCode::GSHEA;
        if (!is_hybrid(family) && code == VariableCode::GSHEA) code = VariableCode::SHEA;
    }
    return out;
}

// Plain families must not see the GARCH forecast feature, and SHEA history
// never rides alongside it. A hybrid without GSHEA is legal: the importance
// study deletes it on purpose.
inline void validate_features(const FeatureSet& features, ModelFamily family) {
    const bool has_gshea = std::find(features.inputs.begin(), features.inputs.end(),
                                     VariableCode::GSHEA) != features.inputs.end();
    const bool has_shea = std::find(features.inputs.begin(), features.inputs.end(),
                                    VariableCode::SHEA) != features.inputs.end();
    if (is_recurrent(family)) {
        if (!is_hybrid(family) && has_gshea)
            throw ConfigError("plain family must not use the GSHEA input feature");
        if (has_gshea && has_shea)
            throw ConfigError("SHEA must not appear as an input alongside GSHEA");
    }
}

/**
 * Builds the sliding-window samples: sample k takes feature rows
 * k..k+window-1 and the target column at row k+window. Produces
 * (panel length - window) samples.
 */
inline std::vector<TrainingSample> assemble_samples(const ObservationPanel& panel,
                                                    const FeatureSet& features,
                                                    std::size_t window) {
    if (panel.length() <= window)
        throw InsufficientDataError("assemble_samples: panel length " +
                                    std::to_string(panel.length()) +
                                    " leaves no sample for window " + std::to_string(window));
    std::vector<const std::vector<double>*> cols;
    cols.reserve(features.inputs.size());
    for (VariableCode code : features.inputs) cols.push_back(&panel.column(code));
    const auto& target = panel.column(features.target);

    const std::size_t count = panel.length() - window;
    std::vector<TrainingSample> samples(count);
    for (std::size_t k = 0; k < count; ++k) {
        Eigen::MatrixXd m(window, cols.size());
        for (std::size_t t = 0; t < window; ++t)
            for (std::size_t c = 0; c < cols.size(); ++c)
                m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = (*cols[c])[k + t];
        samples[k].window = std::move(m);
        samples[k].target = target[k + window];
    }
    return samples;
}

/// Prediction for day t is the arithmetic mean of the `window` prior days.
/// Output index i forecasts day window+i; the final entry is the one-step
/// forecast beyond the observed series.
inline std::vector<double> moving_average_forecast(const std::vector<double>& prices,
                                                   std::size_t window) {
    if (window == 0 || prices.size() < window)
        throw InsufficientDataError("moving_average_forecast: window exceeds the price series");
    std::vector<double> out;
    out.reserve(prices.size() - window + 1);
    double running = 0.0;
    for (std::size_t i = 0; i < window; ++i) running += prices[i];
    for (std::size_t i = window;; ++i) {
        out.push_back(running / static_cast<double>(window));
        if (i == prices.size()) break;
        running += prices[i] - prices[i - window];
    }
    return out;
}

/// Book-keeping of one rolling pass, reported so callers can cross-check
/// the emitted record count.
struct RollArithmetic {
    std::size_t usable_days = 0;           // days after any GSHEA burn-in
    std::size_t samples = 0;               // usable_days - window (recurrent families)
    std::size_t samples_per_roll = 0;      // days_per_roll - window
    std::size_t rolls = 0;
    std::size_t tuning_rolls = 0;          // floor(split * rolls)
};

struct RollingRunResult {
    std::vector<ForecastRecord> records;   // in date order
    RollArithmetic arithmetic;
};

namespace detail {

/// Seed for one roll: reproducible and independent of scheduling.
inline std::uint64_t roll_seed(const RollConfig& config, std::size_t roll) {
    Rng base(config.master_seed);
    return base.derive(static_cast<std::uint64_t>(config.family) * 1000003ULL +
                       config.window * 10007ULL + roll)
        .next_u64();
}

/// Panel the rolling loop actually iterates: hybrids run on the sub-panel
/// where the GSHEA column exists. A panel that already carries GSHEA is
/// used as-is (precomputed feature, no burn-in consumed).
inline ObservationPanel working_panel(const ObservationPanel& panel, const RollConfig& config) {
    if (!is_hybrid(config.family)) return panel;
    if (panel.has_column(VariableCode::GSHEA)) return panel;
    const auto& prices = panel.column(VariableCode::SHEA);
    if (panel.length() <= config.garch_window)
        throw InsufficientDataError(
            "rolling_run: hybrid family needs more days than the GARCH window (" +
            std::to_string(config.garch_window) + "), got " + std::to_string(panel.length()));
    const auto gshea =
        rolling_garch_price_forecast(prices, config.garch_window, config.garch, config.workers);
    return panel.slice(config.garch_window, panel.length() - config.garch_window)
        .with_column(VariableCode::GSHEA, gshea.prices);
}

} // namespace detail

/**
 * The rolling retrain-predict loop. Each roll trains on the most recent
 * days_per_roll days and predicts exactly the next one; the first
 * floor(split * rolls) records form the tuning segment. Recurrent models
 * are retrained from a fresh per-roll seed, so results do not depend on
 * worker count. `roll_subrange`, when set, restricts execution to rolls
 * [first, second) — used by the tuning-only searches.
 */
inline RollingRunResult rolling_run(
    const ObservationPanel& panel, const RollConfig& config, const RnnSpec& rnn_template,
    const FeatureSet& base_features,
    std::optional<std::pair<std::size_t, std::size_t>> roll_subrange = std::nullopt) {
    validate_config(config);
    if (panel.has_missing()) throw DataError("rolling_run: panel has missing cells; clean it first");

    const FeatureSet features = features_for_family(base_features, config.family);
    validate_features(features, config.family);

    RollingRunResult result;
    auto& arith = result.arithmetic;

    if (config.family == ModelFamily::MA || config.family == ModelFamily::GARCH) {
        const auto& prices = panel.column(features.target);
        std::vector<double> forecasts;
        std::size_t burn = 0;
        if (config.family == ModelFamily::MA) {
            burn = config.window;
            forecasts = moving_average_forecast(prices, config.window);
        } else {
            burn = config.garch_window;
            forecasts = rolling_garch_price_forecast(prices, config.garch_window, config.garch,
                                                     config.workers)
                            .prices;
        }
        arith.usable_days = panel.length();
        arith.samples = arith.usable_days - burn;
        arith.samples_per_roll = 0;
        arith.rolls = arith.usable_days - burn; // in-sample forecasts only
        arith.tuning_rolls =
            static_cast<std::size_t>(std::floor(config.split * static_cast<double>(arith.rolls)));
        const auto range = roll_subrange.value_or(std::make_pair<std::size_t>(0, arith.rolls));
        for (std::size_t i = range.first; i < std::min(range.second, arith.rolls); ++i) {
            ForecastRecord rec;
            rec.date = panel.dates()[burn + i];
            rec.predicted = forecasts[i];
            rec.realized = prices[burn + i];
            rec.model_id = std::string(family_name(config.family));
            rec.segment = i < arith.tuning_rolls ? Segment::Tuning : Segment::Implementation;
            result.records.push_back(std::move(rec));
        }
        return result;
    }

    const ObservationPanel work = detail::working_panel(panel, config);
    arith.usable_days = work.length();
    if (arith.usable_days <= config.days_per_roll)
        throw InsufficientDataError("rolling_run: need more than " +
                                    std::to_string(config.days_per_roll) + " usable days, have " +
                                    std::to_string(arith.usable_days));
    const auto samples = assemble_samples(work, features, config.window);
    arith.samples = samples.size();
    arith.samples_per_roll = config.days_per_roll - config.window;
    arith.rolls = arith.usable_days - config.days_per_roll;
    arith.tuning_rolls =
        static_cast<std::size_t>(std::floor(config.split * static_cast<double>(arith.rolls)));

    const auto range = roll_subrange.value_or(std::make_pair<std::size_t>(0, arith.rolls));
    const std::size_t first = range.first;
    const std::size_t last = std::min(range.second, arith.rolls);
    if (first >= last) return result;

    const CellKind cell = (config.family == ModelFamily::LSTM ||
                           config.family == ModelFamily::GARCH_LSTM)
                              ? CellKind::LSTM
                              : CellKind::GRU;

    result.records.resize(last - first);
    parallel_for(last - first, config.workers, [&](std::size_t offset) {
        const std::size_t roll = first + offset;
        RnnSpec spec = rnn_template;
        spec.cell = cell;
        spec.input_dim = features.inputs.size();
        spec.seed = detail::roll_seed(config, roll);

        std::vector<TrainingSample> train_set(samples.begin() + roll,
                                              samples.begin() + roll + arith.samples_per_roll);
        const RnnModel model = train(spec, train_set);
        const auto& predict_sample = samples[roll + arith.samples_per_roll];

        ForecastRecord rec;
        rec.date = work.dates()[roll + config.days_per_roll];
        rec.predicted = predict(model, predict_sample.window);
        rec.realized = predict_sample.target;
        rec.model_id = std::string(family_name(config.family));
        rec.segment = roll < arith.tuning_rolls ? Segment::Tuning : Segment::Implementation;
        result.records[offset] = std::move(rec);
    });
    return result;
}

namespace detail {

/// MSE over the tuning rolls only; implementation rolls are never trained.
inline double tuning_mse(const ObservationPanel& panel, const RollConfig& config,
                         const RnnSpec& rnn, const FeatureSet& features) {
    validate_config(config);
    RollingRunResult probe = rolling_run(panel, config, rnn, features,
                                         std::make_pair<std::size_t>(0, 0));
    const std::size_t tuning_rolls = probe.arithmetic.tuning_rolls;
    if (tuning_rolls == 0) throw InsufficientDataError("tuning segment is empty");
    const auto run = rolling_run(panel, config, rnn, features,
                                 std::make_pair<std::size_t>(0, tuning_rolls));
    double sse = 0.0;
    for (const auto& rec : run.records) {
        const double e = rec.predicted - rec.realized;
        sse += e * e;
    }
    return sse / static_cast<double>(run.records.size());
}

} // namespace detail

struct HyperGrid {
    std::vector<double> dropouts = {0.0, 0.2};
    std::vector<std::size_t> epoch_counts = {100, 150};
    std::vector<double> learning_rates = {0.001, 0.01};
};

struct GridPoint {
    double dropout = 0.0;
    std::size_t epochs = 0;
    double learning_rate = 0.0;
    double tuning_mse = 0.0;
};

struct GridSearchResult {
    GridPoint best;
    std::vector<GridPoint> evaluations; // one per combination, in grid order
};

/**
 * Exhaustive hyperparameter search scored by MSE over the tuning rolls
 * only. Ties go to lower dropout, then fewer epochs, then lower learning
 * rate.
 */
inline GridSearchResult grid_search(const ObservationPanel& panel, const RollConfig& config,
                                    const RnnSpec& rnn_template, const FeatureSet& features,
                                    const HyperGrid& grid = {}) {
    if (grid.dropouts.empty() || grid.epoch_counts.empty() || grid.learning_rates.empty())
        throw ConfigError("grid_search: empty grid");
    if (!is_recurrent(config.family))
        throw ConfigError("grid_search: only recurrent families have hyperparameters to tune");

    GridSearchResult result;
    bool have_best = false;
    for (double dropout : grid.dropouts) {
        for (std::size_t epochs : grid.epoch_counts) {
            for (double lr : grid.learning_rates) {
                RnnSpec spec = rnn_template;
                spec.dropout = dropout;
                spec.epochs = epochs;
                spec.learning_rate = lr;

                GridPoint point{dropout, epochs, lr,
                                detail::tuning_mse(panel, config, spec, features)};
                result.evaluations.push_back(point);
                const auto key = [](const GridPoint& p) {
                    return std::make_tuple(p.tuning_mse, p.dropout, p.epochs, p.learning_rate);
                };
                if (!have_best || key(point) < key(result.best)) {
                    result.best = point;
                    have_best = true;
                }
            }
        }
    }
    return result;
}

struct RfeResult {
    FeatureSet selected;
    std::vector<VariableCode> eliminated; // in elimination order
};

/**
 * Recursive feature elimination: repeatedly drops the input whose removal
 * leaves the lowest tuning-segment MSE (re-evaluated after every removal)
 * until target_count inputs remain.
 */
inline RfeResult recursive_feature_elimination(const ObservationPanel& panel,
                                               const RollConfig& config, const RnnSpec& rnn,
                                               const FeatureSet& start_features,
                                               std::size_t target_count) {
    if (start_features.inputs.size() <= target_count)
        throw ConfigError("recursive_feature_elimination: target_count must be below the start count");
    if (!is_recurrent(config.family))
        throw ConfigError("recursive_feature_elimination: requires a trainable model family");

    RfeResult result;
    result.selected = features_for_family(start_features, config.family);
    while (result.selected.inputs.size() > target_count) {
        double best_mse = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < result.selected.inputs.size(); ++i) {
            FeatureSet candidate = result.selected;
            candidate.inputs.erase(candidate.inputs.begin() + static_cast<std::ptrdiff_t>(i));
            const double mse = detail::tuning_mse(panel, config, rnn, candidate);
            if (mse < best_mse) {
                best_mse = mse;
                best_idx = i;
            }
        }
        result.eliminated.push_back(result.selected.inputs[best_idx]);
        result.selected.inputs.erase(result.selected.inputs.begin() +
                                     static_cast<std::ptrdiff_t>(best_idx));
    }
    return result;
}

} // namespace carbcast
