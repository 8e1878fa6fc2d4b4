#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "carbcast/errors.hpp"
#include "carbcast/nelder_mead.hpp"
#include "carbcast/panel.hpp"
#include "carbcast/parallel.hpp"
#include "carbcast/rng.hpp"

namespace carbcast {

/// Model orders for an ARMA(R,M) mean with GARCH(p,q) errors and standard
/// normal innovations.
struct GarchSpec {
    std::size_t arch_order = 1;  // p, count of squared-residual terms (>= 1)
    std::size_t garch_order = 1; // q, count of lagged-variance terms
    std::size_t ar_order = 0;    // R
    std::size_t ma_order = 0;    // M
};

struct GarchParams {
    double mean_const = 0.0;         // constant of the mean equation
    std::vector<double> ar_coef;     // R autoregressive coefficients
    std::vector<double> ma_coef;     // M moving-average coefficients
    double var_const = 0.0;          // variance intercept, > 0
    std::vector<double> arch_coef;   // p coefficients on lagged squared residuals, >= 0
    std::vector<double> garch_coef;  // q coefficients on lagged variances, >= 0
};

inline void validate_params(const GarchParams& params, const GarchSpec& spec) {
    if (params.ar_coef.size() != spec.ar_order || params.ma_coef.size() != spec.ma_order ||
        params.arch_coef.size() != spec.arch_order || params.garch_coef.size() != spec.garch_order)
        throw DomainError("garch: parameter vector sizes do not match the spec orders");
    if (!(params.var_const > 0.0)) throw DomainError("garch: variance constant must be positive");
    double persistence = 0.0;
    for (double a : params.arch_coef) {
        if (a < 0.0) throw DomainError("garch: negative arch coefficient");
        persistence += a;
    }
    for (double g : params.garch_coef) {
        if (g < 0.0) throw DomainError("garch: negative garch coefficient");
        persistence += g;
    }
    if (!(persistence < 1.0)) throw DomainError("garch: arch+garch coefficients must sum below 1");
}

/// Steady state of the variance recursion: k / (1 - sum(A) - sum(G)).
inline double unconditional_variance(const GarchParams& params) {
    double persistence = 0.0;
    for (double a : params.arch_coef) persistence += a;
    for (double g : params.garch_coef) persistence += g;
    if (!(persistence < 1.0))
        throw NonStationaryError("unconditional_variance: arch+garch coefficients sum to " +
                                 std::to_string(persistence));
    return params.var_const / (1.0 - persistence);
}

struct GarchFit {
    GarchSpec spec;
    GarchParams params;
    std::vector<double> h_path;     // conditional variances, one per return
    std::vector<double> residuals;  // mean-equation residuals, one per return
    double loglik = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

namespace detail {

struct GarchPaths {
    std::vector<double> residuals;
    std::vector<double> variances;
};

/**
 * Evaluates the mean and variance recursions over `returns`.
 *
 * Initialization: presample returns and residuals are zero; presample
 * variances equal the sample variance of the estimation window.
 */
inline GarchPaths garch_paths(const GarchParams& params, const std::vector<double>& returns,
                              const GarchSpec& spec) {
    const std::size_t n = returns.size();
    GarchPaths paths;
    paths.residuals.resize(n);
    paths.variances.resize(n);

    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(std::max<std::size_t>(n, 1));
    double presample_var = 0.0;
    for (double r : returns) presample_var += (r - mean) * (r - mean);
    presample_var = n > 1 ? presample_var / static_cast<double>(n - 1) : 0.0;

    for (std::size_t t = 0; t < n; ++t) {
        double eps = returns[t] - params.mean_const;
        for (std::size_t i = 1; i <= spec.ar_order; ++i)
            eps -= params.ar_coef[i - 1] * (t >= i ? returns[t - i] : 0.0);
        for (std::size_t j = 1; j <= spec.ma_order; ++j)
            eps -= params.ma_coef[j - 1] * (t >= j ? paths.residuals[t - j] : 0.0);
        paths.residuals[t] = eps;

        double h = params.var_const;
        for (std::size_t i = 1; i <= spec.garch_order; ++i)
            h += params.garch_coef[i - 1] * (t >= i ? paths.variances[t - i] : presample_var);
        for (std::size_t i = 1; i <= spec.arch_order; ++i) {
            const double past_eps = t >= i ? paths.residuals[t - i] : 0.0;
            h += params.arch_coef[i - 1] * past_eps * past_eps;
        }
        paths.variances[t] = h;
    }
    return paths;
}

// Unconstrained optimizer coordinates:
//   [mean_const, ar..., ma..., log(var_const), u_1..u_{p+q}]
// Arch/garch coefficients come from a softmax with an implicit unit slack
// term, scaled by kMaxPersistence: positivity and sum(A)+sum(G) < 1 are
// structural. The cap sits strictly below 1 because the likelihood of
// near-white-noise data is flat along the IGARCH ridge (G -> 1, k -> 0),
// where the variance intercept loses identification.
inline constexpr double kMaxPersistence = 0.999;

inline std::size_t param_dim(const GarchSpec& spec) {
    return 1 + spec.ar_order + spec.ma_order + 1 + spec.arch_order + spec.garch_order;
}

inline GarchParams from_unconstrained(const std::vector<double>& x, const GarchSpec& spec) {
    GarchParams p;
    std::size_t idx = 0;
    p.mean_const = x[idx++];
    for (std::size_t i = 0; i < spec.ar_order; ++i) p.ar_coef.push_back(x[idx++]);
    for (std::size_t i = 0; i < spec.ma_order; ++i) p.ma_coef.push_back(x[idx++]);
    p.var_const = std::exp(std::clamp(x[idx++], -700.0, 700.0)); // keeps k finite and positive

    const std::size_t count = spec.arch_order + spec.garch_order;
    std::vector<double> weights(count);
    double denom = 1.0;
    for (std::size_t i = 0; i < count; ++i) {
        weights[i] = std::exp(std::min(x[idx + i], 30.0));
        denom += weights[i];
    }
    for (std::size_t i = 0; i < spec.arch_order; ++i)
        p.arch_coef.push_back(kMaxPersistence * weights[i] / denom);
    for (std::size_t i = 0; i < spec.garch_order; ++i)
        p.garch_coef.push_back(kMaxPersistence * weights[spec.arch_order + i] / denom);
    return p;
}

inline std::vector<double> to_unconstrained(const GarchParams& p, const GarchSpec& spec) {
    std::vector<double> x;
    x.push_back(p.mean_const);
    for (double v : p.ar_coef) x.push_back(v);
    for (double v : p.ma_coef) x.push_back(v);
    x.push_back(std::log(p.var_const));
    double slack = kMaxPersistence;
    for (double a : p.arch_coef) slack -= a;
    for (double g : p.garch_coef) slack -= g;
    slack = std::max(slack, 1e-10) / kMaxPersistence;
    for (double a : p.arch_coef)
        x.push_back(std::log(std::max(a, 1e-12) / kMaxPersistence / slack));
    for (double g : p.garch_coef)
        x.push_back(std::log(std::max(g, 1e-12) / kMaxPersistence / slack));
    return x;
}

} // namespace detail

/**
 * Gaussian negative log-likelihood:
 *   (1/2) * sum_t [ ln(2 pi) + ln h_t + eps_t^2 / h_t ]
 * with the recursions and initialization described in detail::garch_paths.
 */
inline double negative_log_likelihood(const GarchParams& params, const std::vector<double>& returns,
                                      const GarchSpec& spec) {
    validate_params(params, spec);
    if (returns.empty()) throw InsufficientDataError("negative_log_likelihood: empty return series");
    const auto paths = detail::garch_paths(params, returns, spec);
    double nll = 0.0;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        const double h = paths.variances[t];
        const double eps = paths.residuals[t];
        nll += std::log(2.0 * std::numbers::pi) + std::log(h) + eps * eps / h;
    }
    return 0.5 * nll;
}

/**
 * Maximum-likelihood fit via Nelder-Mead in the unconstrained
 * reparameterization, multi-started from three fixed initial points. The
 * returned `converged` flag reports the winning start's simplex status.
 */
inline GarchFit fit_garch(const std::vector<double>& returns, const GarchSpec& spec = {}) {
    if (returns.size() < 50) throw InsufficientDataError("fit_garch: need at least 50 observations");

    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    double variance = 0.0;
    for (double r : returns) variance += (r - mean) * (r - mean);
    variance /= static_cast<double>(returns.size() - 1);
    if (!(variance > 0.0)) throw DegenerateSeriesError("fit_garch: zero sample variance");

    auto objective = [&](const std::vector<double>& x) {
        const GarchParams p = detail::from_unconstrained(x, spec);
        const auto paths = detail::garch_paths(p, returns, spec);
        double nll = 0.0;
        for (std::size_t t = 0; t < returns.size(); ++t) {
            const double h = paths.variances[t];
            const double eps = paths.residuals[t];
            if (!(h > 0.0) || !std::isfinite(h)) return 1e300;
            nll += std::log(h) + eps * eps / h;
        }
        nll = 0.5 * (nll + static_cast<double>(returns.size()) * std::log(2.0 * std::numbers::pi));
        return std::isfinite(nll) ? nll : 1e300;
    };

    // Three fixed persistence profiles; the variance intercept is chosen so
    // the implied unconditional variance matches the sample variance. Each
    // start gets shrinking-step restarts: a single simplex pass can collapse
    // short of the optimum.
    const double start_profiles[3][2] = {{0.05, 0.90}, {0.10, 0.80}, {0.20, 0.60}};

    SimplexResult best;
    best.fx = std::numeric_limits<double>::infinity();
    std::size_t total_iterations = 0;
    for (const auto& profile : start_profiles) {
        GarchParams init;
        init.mean_const = mean;
        init.ar_coef.assign(spec.ar_order, 0.0);
        init.ma_coef.assign(spec.ma_order, 0.0);
        const double arch_total = profile[0];
        const double garch_total = profile[1];
        init.arch_coef.assign(spec.arch_order, arch_total / static_cast<double>(spec.arch_order));
        if (spec.garch_order > 0)
            init.garch_coef.assign(spec.garch_order,
                                   garch_total / static_cast<double>(spec.garch_order));
        const double persistence = arch_total + (spec.garch_order > 0 ? garch_total : 0.0);
        init.var_const = variance * (1.0 - persistence);

        SimplexResult run = nelder_mead(objective, detail::to_unconstrained(init, spec));
        total_iterations += run.iterations;
        for (double step : {0.1, 0.02, 0.004}) {
            SimplexOptions opt;
            opt.initial_step = step;
            const SimplexResult again = nelder_mead(objective, run.x, opt);
            total_iterations += again.iterations;
            const bool improved = again.fx < run.fx - 1e-10;
            if (again.fx < run.fx) run = again;
            if (!improved) break;
        }
        if (run.fx < best.fx) best = run;
    }

    GarchFit fit;
    fit.spec = spec;
    fit.params = detail::from_unconstrained(best.x, spec);
    const auto paths = detail::garch_paths(fit.params, returns, spec);
    fit.residuals = paths.residuals;
    fit.h_path = paths.variances;
    fit.loglik = -negative_log_likelihood(fit.params, returns, spec);
    fit.converged = best.converged;
    fit.iterations = total_iterations;
    return fit;
}

struct GarchForecast {
    double mean = 0.0;
    double variance = 0.0;
};

/**
 * One-step-ahead conditional mean and variance, computed from the fitted
 * parameters applied to `returns` (the estimation series or an extension
 * of it).
 */
inline GarchForecast forecast_one_step(const GarchFit& fit, const std::vector<double>& returns) {
    if (returns.size() < fit.residuals.size())
        throw ShapeError("forecast_one_step: series shorter than the fitted sample");
    const auto paths = detail::garch_paths(fit.params, returns, fit.spec);
    const std::size_t n = returns.size();

    GarchForecast out;
    out.mean = fit.params.mean_const;
    for (std::size_t i = 1; i <= fit.spec.ar_order; ++i)
        out.mean += fit.params.ar_coef[i - 1] * (n >= i ? returns[n - i] : 0.0);
    for (std::size_t j = 1; j <= fit.spec.ma_order; ++j)
        out.mean += fit.params.ma_coef[j - 1] * (n >= j ? paths.residuals[n - j] : 0.0);

    out.variance = fit.params.var_const;
    for (std::size_t i = 1; i <= fit.spec.garch_order; ++i)
        out.variance += fit.params.garch_coef[i - 1] * (n >= i ? paths.variances[n - i] : 0.0);
    for (std::size_t i = 1; i <= fit.spec.arch_order; ++i) {
        const double past_eps = n >= i ? paths.residuals[n - i] : 0.0;
        out.variance += fit.params.arch_coef[i - 1] * past_eps * past_eps;
    }
    return out;
}

struct RollingGarchForecast {
    std::vector<double> prices;      // one-step price forecasts
    std::vector<bool> converged;     // per-window fit status
};

/**
 * Rolling one-step price forecast: for each position i the model is fitted
 * on log-returns of prices[i .. i+window-1] and the next day's price is
 * forecast as prices[i+window-1] * exp(mean forecast). Output index t holds
 * the forecast for day window+t, made with data through day window+t-1
 * only. A zero-variance window yields a forecast return of 0 and a
 * non-converged flag instead of aborting the pass.
 */
inline RollingGarchForecast rolling_garch_price_forecast(const std::vector<double>& prices,
                                                         std::size_t window = 200,
                                                         const GarchSpec& spec = {},
                                                         std::size_t workers = 1) {
    if (prices.size() <= window)
        throw InsufficientDataError("rolling_garch_price_forecast: need more prices than the window");
    for (std::size_t i = 0; i < prices.size(); ++i)
        if (!(prices[i] > 0.0))
            throw DomainError("rolling_garch_price_forecast: non-positive price at index " +
                              std::to_string(i));

    const std::size_t count = prices.size() - window;
    RollingGarchForecast out;
    out.prices.resize(count);
    std::vector<char> ok(count, 1); // vector<bool> is not thread-safe per element
    parallel_for(count, workers, [&](std::size_t i) {
        const std::vector<double> slice(prices.begin() + i, prices.begin() + i + window);
        const auto returns = log_returns(slice);
        double var = 0.0, m = 0.0;
        for (double r : returns) m += r;
        m /= static_cast<double>(returns.size());
        for (double r : returns) var += (r - m) * (r - m);
        double forecast_return = 0.0;
        bool converged = false;
        if (var > 0.0) {
            const auto fit = fit_garch(returns, spec);
            forecast_return = forecast_one_step(fit, returns).mean;
            converged = fit.converged;
        }
        out.prices[i] = prices[i + window - 1] * std::exp(forecast_return);
        ok[i] = converged ? 1 : 0;
    });
    out.converged.assign(ok.begin(), ok.end());
    return out;
}

/// Simulated ARMA-GARCH return series (shared by tests and the synthetic panel).
inline std::vector<double> simulate_garch(const GarchParams& params, const GarchSpec& spec,
                                          std::size_t n, Rng& rng, std::size_t burn_in = 1000) {
    validate_params(params, spec);
    const double h0 = unconditional_variance(params);
    std::vector<double> eps_hist, h_hist, r_hist;
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t t = 0; t < burn_in + n; ++t) {
        double h = params.var_const;
        for (std::size_t i = 1; i <= spec.garch_order; ++i)
            h += params.garch_coef[i - 1] * (t >= i ? h_hist[t - i] : h0);
        for (std::size_t i = 1; i <= spec.arch_order; ++i) {
            const double past = t >= i ? eps_hist[t - i] : std::sqrt(h0);
            h += params.arch_coef[i - 1] * past * past;
        }
        const double eps = rng.normal() * std::sqrt(h);

        double r = params.mean_const + eps;
        for (std::size_t i = 1; i <= spec.ar_order; ++i)
            r += params.ar_coef[i - 1] * (t >= i ? r_hist[t - i] : 0.0);
        for (std::size_t j = 1; j <= spec.ma_order; ++j)
            r += params.ma_coef[j - 1] * (t >= j ? eps_hist[t - j] : 0.0);

        h_hist.push_back(h);
        eps_hist.push_back(eps);
        r_hist.push_back(r);
        if (t >= burn_in) out.push_back(r);
    }
    return out;
}

} // namespace carbcast
