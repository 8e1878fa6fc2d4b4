#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "carbcast/errors.hpp"
#include "carbcast/records.hpp"
#include "carbcast/rng.hpp"

namespace carbcast {

/// Which price the forecast change is measured against.
enum class SignalDenominator { ForecastPrice, RealizedPrice };

/**
 * Daily timing signals: delta is the forecast one-day relative change and
 * y fires (buy) when delta reaches the threshold, boundary inclusive.
 */
struct SignalSeries {
    std::vector<Date> dates;
    std::vector<double> delta;
    std::vector<int> signal; // y in {0,1}
    double threshold = 0.02;
};

/// delta_t = PV_{t+1} / denominator_t - 1; the last forecast date emits no
/// signal because it has no successor.
inline SignalSeries generate_signals(const std::vector<ForecastRecord>& forecasts,
                                     double threshold = 0.02,
                                     SignalDenominator denominator = SignalDenominator::ForecastPrice) {
    if (forecasts.size() < 2)
        throw InsufficientDataError("generate_signals: need at least two forecasts");
    for (std::size_t i = 1; i < forecasts.size(); ++i)
        if (!(forecasts[i - 1].date < forecasts[i].date))
            throw OrderingError("generate_signals: forecasts not in ascending date order");

    SignalSeries out;
    out.threshold = threshold;
    for (std::size_t i = 0; i + 1 < forecasts.size(); ++i) {
        const double denom = denominator == SignalDenominator::ForecastPrice
                                 ? forecasts[i].predicted
                                 : forecasts[i].realized;
        if (!(denom > 0.0))
            throw DomainError("generate_signals: non-positive denominator at " +
                              forecasts[i].date.to_string());
        const double delta = forecasts[i + 1].predicted / denom - 1.0;
        out.dates.push_back(forecasts[i].date);
        out.delta.push_back(delta);
        out.signal.push_back(delta >= threshold ? 1 : 0);
    }
    return out;
}

struct TradeLot {
    Date date;
    std::size_t lots = 0;
    double price = 0.0; // execution price, yuan/ton
    double cost = 0.0;  // lots * lot_size * price
};

/// Executed purchases of one strategy run. Lots always total
/// shortfall / lot_size; forced_completion marks runs that had to buy the
/// remainder on the final day.
struct TradeLedger {
    std::vector<TradeLot> buys;
    double lot_size = 1000.0;   // tons per transaction
    double shortfall = 20000.0; // tons to procure
    double total_cost = 0.0;    // yuan
    bool forced_completion = false;

    std::string to_csv() const {
        std::string out = "date,lots,price,cost\n";
        for (const auto& b : buys)
            out += b.date.to_string() + "," + std::to_string(b.lots) + "," +
                   format_double(b.price) + "," + format_double(b.cost) + "\n";
        return out;
    }
};

/**
 * Iceberg-order execution: one lot at the realized closing price on every
 * buy-signal day, stopping once the shortfall is covered. Lots still
 * unfilled when the window ends are bought at the final day's close.
 */
inline TradeLedger iceberg_backtest(const SignalSeries& signals, const std::vector<Date>& price_dates,
                                    const std::vector<double>& prices, double shortfall = 20000.0,
                                    double lot_size = 1000.0) {
    if (price_dates.size() != prices.size() || prices.empty())
        throw DataError("iceberg_backtest: price series empty or misaligned");
    if (!(lot_size > 0.0) || !(shortfall > 0.0))
        throw ConfigError("iceberg_backtest: shortfall and lot size must be positive");
    const double lots_needed_real = shortfall / lot_size;
    const auto lots_needed = static_cast<std::size_t>(lots_needed_real + 0.5);
    if (std::abs(lots_needed_real - static_cast<double>(lots_needed)) > 1e-9)
        throw ConfigError("iceberg_backtest: shortfall must be divisible by the lot size");

    std::map<Date, double> price_by_date;
    for (std::size_t i = 0; i < prices.size(); ++i) price_by_date[price_dates[i]] = prices[i];

    TradeLedger ledger;
    ledger.lot_size = lot_size;
    ledger.shortfall = shortfall;

    std::size_t bought = 0;
    for (std::size_t i = 0; i < signals.dates.size() && bought < lots_needed; ++i) {
        if (signals.signal[i] != 1) continue;
        const auto it = price_by_date.find(signals.dates[i]);
        if (it == price_by_date.end())
            throw DataGapError("iceberg_backtest: no price for signal day " +
                               signals.dates[i].to_string());
        TradeLot buy;
        buy.date = signals.dates[i];
        buy.lots = 1;
        buy.price = it->second;
        buy.cost = lot_size * it->second;
        ledger.total_cost += buy.cost;
        ledger.buys.push_back(buy);
        ++bought;
    }
    if (bought < lots_needed) {
        TradeLot buy;
        buy.date = price_dates.back();
        buy.lots = lots_needed - bought;
        buy.price = prices.back();
        buy.cost = static_cast<double>(buy.lots) * lot_size * buy.price;
        ledger.total_cost += buy.cost;
        ledger.buys.push_back(buy);
        ledger.forced_completion = true;
    }
    return ledger;
}

/**
 * Random benchmark: each trial buys one lot on shortfall/lot distinct days
 * drawn uniformly without replacement. Per-trial generators derive from
 * (seed, trial index), so the cost vector is reproducible and independent
 * of evaluation order.
 */
inline std::vector<double> random_baseline(const std::vector<double>& prices,
                                           std::size_t trials = 1000, double shortfall = 20000.0,
                                           double lot_size = 1000.0, std::uint64_t seed = 0) {
    if (!(lot_size > 0.0) || !(shortfall > 0.0))
        throw ConfigError("random_baseline: shortfall and lot size must be positive");
    const auto lots_needed = static_cast<std::size_t>(shortfall / lot_size + 0.5);
    if (prices.size() < lots_needed)
        throw InsufficientDataError("random_baseline: fewer trading days than required lots");

    Rng master(seed);
    std::vector<double> costs(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        Rng trial_rng = master.derive(t);
        const auto days = trial_rng.sample_without_replacement(prices.size(), lots_needed);
        double cost = 0.0;
        for (std::size_t day : days) cost += lot_size * prices[day];
        costs[t] = cost;
    }
    return costs;
}

/// Hindsight bound used in sanity checks: cover the shortfall on the
/// cheapest days of the window.
inline double perfect_foresight_cost(const std::vector<double>& prices, double shortfall = 20000.0,
                                     double lot_size = 1000.0) {
    const auto lots_needed = static_cast<std::size_t>(shortfall / lot_size + 0.5);
    if (prices.size() < lots_needed)
        throw InsufficientDataError("perfect_foresight_cost: fewer trading days than required lots");
    std::vector<double> sorted = prices;
    std::sort(sorted.begin(), sorted.end());
    double cost = 0.0;
    for (std::size_t i = 0; i < lots_needed; ++i) cost += lot_size * sorted[i];
    return cost;
}

struct StrategyEvaluation {
    double total_cost = 0.0;
    double baseline_mean_cost = 0.0;
    double reduction_ratio = 0.0;    // 1 - total_cost / baseline_mean_cost
    double relative_quantile = 0.0;  // fraction of baseline trials strictly cheaper
    std::size_t trials = 0;
};

inline StrategyEvaluation evaluate_strategy(const TradeLedger& ledger,
                                            const std::vector<double>& baseline_costs) {
    if (baseline_costs.empty()) throw InsufficientDataError("evaluate_strategy: empty baseline");
    StrategyEvaluation eval;
    eval.total_cost = ledger.total_cost;
    eval.trials = baseline_costs.size();
    double sum = 0.0;
    std::size_t cheaper = 0;
    for (double c : baseline_costs) {
        sum += c;
        if (c < ledger.total_cost) ++cheaper;
    }
    eval.baseline_mean_cost = sum / static_cast<double>(baseline_costs.size());
    eval.reduction_ratio = 1.0 - eval.total_cost / eval.baseline_mean_cost;
    eval.relative_quantile = static_cast<double>(cheaper) / static_cast<double>(eval.trials);
    return eval;
}

} // namespace carbcast
