#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "carbcast/errors.hpp"
#include "carbcast/records.hpp"

namespace carbcast {

/**
 * The five symmetric forecast-error metrics over one record set. MAPE is
 * reported in percent; MSPE and LL stay raw fractions. LL is absent when
 * any predicted value is non-positive.
 */
struct MetricsReport {
    double mae = 0.0;
    double mse = 0.0;
    double mape = 0.0; // percent
    double mspe = 0.0;
    std::optional<double> ll;
    std::size_t n = 0;
    std::string model_id;
    std::size_t window = 0;
};

/**
 *   MAE  = mean |PV - RV|          MSE  = mean (PV - RV)^2
 *   MAPE = 100 * mean |1 - PV/RV|  MSPE = mean (1 - PV/RV)^2
 *   LL   = mean (ln PV - ln RV)^2
 */
inline MetricsReport compute_metrics(const std::vector<ForecastRecord>& records) {
    if (records.empty()) throw InsufficientDataError("compute_metrics: no records");
    MetricsReport report;
    report.n = records.size();
    report.model_id = records.front().model_id;

    bool ll_defined = true;
    double sum_ae = 0.0, sum_se = 0.0, sum_ape = 0.0, sum_spe = 0.0, sum_ll = 0.0;
    for (const auto& r : records) {
        if (!(r.realized > 0.0))
            throw DomainError("compute_metrics: non-positive realized value at " +
                              r.date.to_string());
        const double err = r.predicted - r.realized;
        const double rel = 1.0 - r.predicted / r.realized;
        sum_ae += std::abs(err);
        sum_se += err * err;
        sum_ape += std::abs(rel);
        sum_spe += rel * rel;
        if (r.predicted > 0.0)
            sum_ll += std::pow(std::log(r.predicted) - std::log(r.realized), 2);
        else
            ll_defined = false;
    }
    const double count = static_cast<double>(report.n);
    report.mae = sum_ae / count;
    report.mse = sum_se / count;
    report.mape = 100.0 * sum_ape / count;
    report.mspe = sum_spe / count;
    if (ll_defined) report.ll = sum_ll / count;
    return report;
}

namespace detail {

inline std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string sci2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2e", v);
    return buf;
}

} // namespace detail

/**
 * Model-comparison table: one row per (model, window) pair, five metric
 * columns, fixed 4-decimal formatting with scientific notation for MSPE
 * and LL.
 */
struct ComparisonTable {
    std::vector<MetricsReport> rows;

    std::string to_csv() const {
        std::string out = "model,window,mae,mse,mape,mspe,ll\n";
        for (const auto& r : rows) {
            out += r.model_id + "," + std::to_string(r.window) + "," + detail::fixed4(r.mae) +
                   "," + detail::fixed4(r.mse) + "," + detail::fixed4(r.mape) + "," +
                   detail::sci2(r.mspe) + "," + (r.ll ? detail::sci2(*r.ll) : std::string()) +
                   "\n";
        }
        return out;
    }
};

inline ComparisonTable comparison_table(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw InsufficientDataError("comparison_table: no reports");
    std::set<std::pair<std::string, std::size_t>> seen;
    for (const auto& r : reports)
        if (!seen.insert({r.model_id, r.window}).second)
            throw ConfigError("comparison_table: duplicate row for model " + r.model_id +
                              ", window " + std::to_string(r.window));
    return ComparisonTable{reports};
}

} // namespace carbcast
