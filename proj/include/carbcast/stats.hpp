#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "carbcast/errors.hpp"

namespace carbcast {

struct DescriptiveStats {
    double mean = 0.0;
    double maximum = 0.0;
    double minimum = 0.0;
    double std_dev = 0.0; // sample, divisor N-1
    std::size_t n = 0;
};

/**
 * One diagnostic test outcome. Exactly one of p_value / critical_value is
 * set, and reject_at_5pct follows that decision rule.
 */
struct StatTestResult {
    double statistic = 0.0;
    std::optional<double> p_value;
    std::optional<double> critical_value;
    bool reject_at_5pct = false;
};

inline DescriptiveStats descriptive(const std::vector<double>& series) {
    if (series.size() < 2) throw InsufficientDataError("descriptive: need at least 2 observations");
    DescriptiveStats s;
    s.n = series.size();
    s.minimum = series[0];
    s.maximum = series[0];
    double sum = 0.0;
    for (double v : series) {
        sum += v;
        s.minimum = std::min(s.minimum, v);
        s.maximum = std::max(s.maximum, v);
    }
    s.mean = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (double v : series) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(s.n - 1));
    return s;
}

namespace detail {

/// Regularized lower incomplete gamma P(a, x); series + continued fraction.
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw DomainError("gamma_p: requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // series representation
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // continued fraction for Q(a, x), modified Lentz
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

/// Upper tail of the chi-square distribution with k degrees of freedom.
inline double chi_square_sf(double x, double k) {
    if (x <= 0.0) return 1.0;
    return 1.0 - gamma_p(0.5 * k, 0.5 * x);
}

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd std_err;
    double ssr = 0.0;       // sum of squared residuals
    double r_squared = 0.0; // centered R^2
    std::size_t n = 0;
    std::size_t k = 0;
};

inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    OlsFit fit;
    fit.n = static_cast<std::size_t>(X.rows());
    fit.k = static_cast<std::size_t>(X.cols());
    if (fit.n <= fit.k) throw InsufficientDataError("ols: more regressors than observations");
    const Eigen::MatrixXd xtx = X.transpose() * X;
    const Eigen::VectorXd xty = X.transpose() * y;
    const Eigen::LDLT<Eigen::MatrixXd> solver(xtx);
    fit.coef = solver.solve(xty);
    const Eigen::VectorXd resid = y - X * fit.coef;
    fit.ssr = resid.squaredNorm();
    const double sigma2 = fit.ssr / static_cast<double>(fit.n - fit.k);
    const Eigen::MatrixXd cov = sigma2 * solver.solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    fit.std_err = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    const double ybar = y.mean();
    const double tss = (y.array() - ybar).square().sum();
    fit.r_squared = tss > 0.0 ? 1.0 - fit.ssr / tss : 0.0;
    return fit;
}

inline double sample_variance(const std::vector<double>& series) {
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    double ss = 0.0;
    for (double v : series) ss += (v - mean) * (v - mean);
    return series.size() > 1 ? ss / static_cast<double>(series.size() - 1) : 0.0;
}

} // namespace detail

/**
 * Jarque-Bera normality test: (n/6) * (S^2 + (K-3)^2 / 4) with sample
 * skewness S and kurtosis K. Rejects normality at 5% when the statistic
 * exceeds the chi-square(2) cut-off 5.99.
 */
inline StatTestResult jarque_bera(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 8) throw InsufficientDataError("jarque_bera: need at least 8 observations");
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : series) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (!(m2 > 0.0)) throw DegenerateSeriesError("jarque_bera: zero variance");
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    StatTestResult r;
    r.statistic = static_cast<double>(n) / 6.0 * (skew * skew + (kurt - 3.0) * (kurt - 3.0) / 4.0);
    r.critical_value = 5.99;
    r.reject_at_5pct = r.statistic > 5.99;
    return r;
}

inline std::size_t adf_default_max_lag(std::size_t n) {
    return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

/**
 * Augmented Dickey-Fuller test, regression with constant and no trend:
 *
 *   dy_t = a + rho * y_{t-1} + sum_{i=1..L} d_i * dy_{t-i} + e_t
 *
 * The lag order L is chosen by AIC over 0..max_lag on a common sample, and
 * the reported statistic is the t-ratio of rho. Rejects the unit root at 5%
 * when the statistic is below the fixed critical value -2.86.
 */
inline StatTestResult adf_test(const std::vector<double>& series, std::size_t max_lag) {
    const std::size_t n = series.size();
    if (n <= max_lag + 2) throw InsufficientDataError("adf_test: series too short for max_lag");

    std::vector<double> diff(n - 1);
    for (std::size_t i = 1; i < n; ++i) diff[i - 1] = series[i] - series[i - 1];

    // Common estimation sample across lag candidates: dy_t for t >= max_lag+1
    // (indices into diff start at max_lag).
    const std::size_t rows = diff.size() - max_lag;
    if (rows <= max_lag + 2) throw InsufficientDataError("adf_test: series too short for max_lag");

    double best_aic = std::numeric_limits<double>::infinity();
    detail::OlsFit best_fit;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        Eigen::MatrixXd X(rows, 2 + lag);
        Eigen::VectorXd y(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t t = max_lag + r; // index into diff
            y(r) = diff[t];
            X(r, 0) = 1.0;
            X(r, 1) = series[t]; // y_{t-1} in levels: diff[t] = y[t+1]-y[t]
            for (std::size_t i = 1; i <= lag; ++i) X(r, 1 + i) = diff[t - i];
        }
        const auto fit = detail::ols(X, y);
        const double aic =
            static_cast<double>(rows) * std::log(fit.ssr / static_cast<double>(rows)) +
            2.0 * static_cast<double>(fit.k);
        if (aic < best_aic) {
            best_aic = aic;
            best_fit = fit;
        }
    }

    StatTestResult r;
    if (!(best_fit.std_err(1) > 0.0)) throw DegenerateSeriesError("adf_test: degenerate regressor");
    r.statistic = best_fit.coef(1) / best_fit.std_err(1);
    r.critical_value = -2.86;
    r.reject_at_5pct = r.statistic < -2.86;
    return r;
}

inline StatTestResult adf_test(const std::vector<double>& series) {
    return adf_test(series, adf_default_max_lag(series.size()));
}

/**
 * Engle's ARCH-LM test on demeaned returns: the squared residuals are
 * regressed on their first `lags` lags and the statistic is n * R^2,
 * asymptotically chi-square with `lags` degrees of freedom.
 */
inline StatTestResult arch_lm(const std::vector<double>& series, std::size_t lags = 12) {
    const std::size_t n = series.size();
    if (n <= 2 * lags) throw InsufficientDataError("arch_lm: series too short for lag order");

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> sq(n);
    double max_abs_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = series[i] - mean;
        sq[i] = e * e;
        max_abs_dev = std::max(max_abs_dev, std::abs(e));
    }
    if (max_abs_dev <= 1e-12 * (std::abs(mean) + 1.0))
        throw DegenerateSeriesError("arch_lm: zero variance");

    const std::size_t rows = n - lags;
    Eigen::MatrixXd X(rows, 1 + lags);
    Eigen::VectorXd y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = lags + r;
        y(r) = sq[t];
        X(r, 0) = 1.0;
        for (std::size_t i = 1; i <= lags; ++i) X(r, i) = sq[t - i];
    }
    const auto fit = detail::ols(X, y);

    StatTestResult r;
    r.statistic = static_cast<double>(rows) * fit.r_squared;
    r.p_value = detail::chi_square_sf(r.statistic, static_cast<double>(lags));
    r.reject_at_5pct = *r.p_value < 0.05;
    return r;
}

} // namespace carbcast
