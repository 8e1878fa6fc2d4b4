#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "carbcast/date.hpp"
#include "carbcast/garch.hpp"
#include "carbcast/panel.hpp"
#include "carbcast/rng.hpp"

namespace carbcast {

/**
 * Synthetic market panel with the full 23-column schema: SHEA follows a
 * GARCH(1,1) log-return process, the other carbon quotas co-move with it,
 * index-like columns follow drifting random walks around a shared macro
 * factor, exchange rates mean-revert, and PM is a positive noisy AR(1).
 * Strictly positive everywhere; fully determined by the seed.
 */
struct SynthConfig {
    std::size_t days = 605;
    std::uint64_t seed = 42;
    double missing_rate = 0.0; // fraction of cells blanked out, for ingest demos
    Date start_date{2016, 11, 28};
};

inline ObservationPanel synth_panel(const SynthConfig& config) {
    if (config.days < 2) throw ConfigError("synth_panel: need at least 2 days");
    Rng master(config.seed);

    // trading calendar: consecutive weekdays
    std::vector<Date> dates;
    dates.reserve(config.days);
    Date d = config.start_date;
    while (dates.size() < config.days) {
        const long weekday = ((d.to_days() % 7) + 7 + 4) % 7; // 1970-01-01 was a Thursday
        if (weekday != 6 && weekday != 0) dates.push_back(d);
        d = d.plus_days(1);
    }

    GarchParams shea_params;
    shea_params.mean_const = 2e-4;
    shea_params.var_const = 2e-5;
    shea_params.arch_coef = {0.10};
    shea_params.garch_coef = {0.85};
    Rng shea_rng = master.derive(0);
    const auto shea_returns = simulate_garch(shea_params, GarchSpec{}, config.days - 1, shea_rng);

    std::vector<double> shea(config.days);
    shea[0] = 35.0;
    for (std::size_t t = 1; t < config.days; ++t) shea[t] = shea[t - 1] * std::exp(shea_returns[t - 1]);

    // shared macro factor driving the index block
    Rng macro_rng = master.derive(1);
    std::vector<double> macro(config.days - 1);
    for (auto& v : macro) v = macro_rng.normal();

    auto correlated_quota = [&](double start, double load, std::uint64_t stream) {
        Rng rng = master.derive(stream);
        std::vector<double> out(config.days);
        out[0] = start;
        for (std::size_t t = 1; t < config.days; ++t) {
            const double ret = load * shea_returns[t - 1] + 0.015 * rng.normal();
            out[t] = out[t - 1] * std::exp(ret);
        }
        return out;
    };
    auto macro_walk = [&](double start, double drift, double vol, double load,
                          std::uint64_t stream) {
        Rng rng = master.derive(stream);
        std::vector<double> out(config.days);
        out[0] = start;
        for (std::size_t t = 1; t < config.days; ++t) {
            const double ret = drift + load * macro[t - 1] + vol * rng.normal();
            out[t] = out[t - 1] * std::exp(ret);
        }
        return out;
    };
    auto mean_reverting = [&](double level, double speed, double vol, std::uint64_t stream) {
        Rng rng = master.derive(stream);
        std::vector<double> out(config.days);
        out[0] = level;
        for (std::size_t t = 1; t < config.days; ++t)
            out[t] = out[t - 1] + speed * (level - out[t - 1]) + vol * rng.normal();
        return out;
    };

    std::vector<VariableCode> codes;
    std::vector<std::vector<double>> cols;
    auto add = [&](VariableCode code, std::vector<double> values) {
        codes.push_back(code);
        cols.push_back(std::move(values));
    };

    add(VariableCode::SHEA, shea);
    add(VariableCode::SZA, correlated_quota(24.0, 0.5, 2));
    add(VariableCode::GDEA, correlated_quota(19.0, 0.4, 3));
    add(VariableCode::HS300, macro_walk(3800.0, 1e-4, 0.011, 0.004, 4));
    add(VariableCode::BP500, macro_walk(2700.0, 2e-4, 0.010, 0.002, 5));
    add(VariableCode::OY, mean_reverting(7.7, 0.02, 0.012, 6));
    add(VariableCode::MY, mean_reverting(6.8, 0.02, 0.011, 7));
    add(VariableCode::CCI500, macro_walk(550.0, 0.0, 0.008, 0.003, 8));
    add(VariableCode::YHQ, macro_walk(4500.0, 0.0, 0.013, 0.002, 9));
    add(VariableCode::QY, macro_walk(6800.0, 0.0, 0.009, 0.002, 10));
    add(VariableCode::FOB, macro_walk(57.0, 0.0, 0.020, 0.004, 11));
    add(VariableCode::WIRED, macro_walk(175.0, 1e-4, 0.012, 0.003, 12));
    add(VariableCode::TRQQH, macro_walk(2.7, 0.0, 0.022, 0.002, 13));
    add(VariableCode::TPFQH, correlated_quota(16.0, 0.3, 14));
    add(VariableCode::CER, macro_walk(0.24, 0.0, 0.018, 0.001, 15));
    add(VariableCode::EUA, macro_walk(16.5, 3e-4, 0.019, 0.002, 16));
    add(VariableCode::SZNY, macro_walk(1400.0, 0.0, 0.012, 0.006, 17));
    add(VariableCode::SZGY, macro_walk(2480.0, 0.0, 0.010, 0.006, 18));
    add(VariableCode::SZZR, macro_walk(1870.0, 0.0, 0.011, 0.006, 19));
    add(VariableCode::CKY, macro_walk(2010.0, 0.0, 0.013, 0.006, 20));
    add(VariableCode::SSZNY, macro_walk(3250.0, 0.0, 0.015, 0.006, 21));
    add(VariableCode::ZZY, macro_walk(2040.0, 0.0, 0.011, 0.006, 22));

    {
        Rng rng = master.derive(23);
        std::vector<double> pm(config.days);
        double level = std::log(35.0);
        for (std::size_t t = 0; t < config.days; ++t) {
            level += 0.1 * (std::log(35.0) - level) + 0.25 * rng.normal();
            pm[t] = std::exp(level);
        }
        add(VariableCode::PM, std::move(pm));
    }

    if (config.missing_rate > 0.0) {
        Rng rng = master.derive(24);
        for (auto& col : cols)
            for (auto& cell : col)
                if (rng.uniform() < config.missing_rate) cell = kMissing;
    }

    return ObservationPanel(std::move(dates), std::move(codes), std::move(cols));
}

} // namespace carbcast
