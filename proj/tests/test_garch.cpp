#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "carbcast/garch.hpp"
#include "carbcast/rng.hpp"

using namespace carbcast;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GarchParams params11(double k, double a, double g, double mean = 0.0) {
    GarchParams p;
    p.mean_const = mean;
    p.var_const = k;
    p.arch_coef = {a};
    p.garch_coef = {g};
    return p;
}

// hand recursion for zero residuals: h_1 = k + G*h0, h_t = k + G*h_{t-1}
double nll_zero_returns_reference(double k, double g, double presample_h, std::size_t n) {
    double nll = 0.0;
    double h_prev = presample_h;
    for (std::size_t t = 0; t < n; ++t) {
        const double h = k + g * h_prev;
        nll += std::log(2.0 * std::numbers::pi) + std::log(h);
        h_prev = h;
    }
    return 0.5 * nll;
}

} // namespace

TEST_CASE("unconditional variance closed form", "[garch]") {
    REQUIRE_THAT(unconditional_variance(params11(0.1, 0.1, 0.8)), WithinRel(1.0, 1e-12));
    REQUIRE_THAT(unconditional_variance(params11(0.05, 0.10, 0.85)), WithinRel(1.0, 1e-12));
    const double sigma2 = 0.42;
    REQUIRE(unconditional_variance(params11(sigma2, 0.0, 0.0)) == sigma2);
    REQUIRE_THROWS_AS(unconditional_variance(params11(0.1, 0.5, 0.5)), NonStationaryError);
}

TEST_CASE("parameter invariants are enforced", "[garch]") {
    const std::vector<double> r(10, 0.1);
    GarchSpec spec;
    REQUIRE_THROWS_AS(negative_log_likelihood(params11(-1.0, 0.1, 0.8), r, spec), DomainError);
    REQUIRE_THROWS_AS(negative_log_likelihood(params11(0.1, -0.1, 0.8), r, spec), DomainError);
    REQUIRE_THROWS_AS(negative_log_likelihood(params11(0.1, 0.6, 0.5), r, spec), DomainError);
}

TEST_CASE("negative log-likelihood exact points", "[garch]") {
    SECTION("single observation, constant variance") {
        const double r = 0.37, sigma2 = 0.9;
        GarchParams p;
        p.var_const = sigma2;
        const double expected = 0.5 * (std::log(2.0 * std::numbers::pi) + std::log(sigma2) +
                                       r * r / sigma2);
        GarchSpec spec{0, 0, 0, 0};
        REQUIRE_THAT(negative_log_likelihood(p, {r}, spec), WithinRel(expected, 1e-14));
    }
    SECTION("zero returns with A = G = 0: h is constant k") {
        const std::size_t n = 50;
        const std::vector<double> zeros(n, 0.0);
        const double k = 0.3;
        const double expected =
            0.5 * static_cast<double>(n) * (std::log(2.0 * std::numbers::pi) + std::log(k));
        REQUIRE_THAT(negative_log_likelihood(params11(k, 0.0, 0.0), zeros, GarchSpec{}),
                     WithinRel(expected, 1e-14));

        // doubling k raises the NLL by (n/2) ln 2
        const double doubled = negative_log_likelihood(params11(2.0 * k, 0.0, 0.0), zeros, GarchSpec{});
        REQUIRE_THAT(doubled - negative_log_likelihood(params11(k, 0.0, 0.0), zeros, GarchSpec{}),
                     WithinRel(0.5 * static_cast<double>(n) * std::log(2.0), 1e-12));
    }
    SECTION("zero returns with persistence: hand-evaluated recursion") {
        // zero series has zero sample variance, so presample h is 0 and the
        // recursion is h_t = k + G h_{t-1} with all squared residuals zero
        const std::size_t n = 25;
        const std::vector<double> zeros(n, 0.0);
        const double k = 0.2, a = 0.1, g = 0.7;
        REQUIRE_THAT(negative_log_likelihood(params11(k, a, g), zeros, GarchSpec{}),
                     WithinRel(nll_zero_returns_reference(k, g, 0.0, n), 1e-13));
    }
}

TEST_CASE("fit_garch input validation", "[garch]") {
    REQUIRE_THROWS_AS(fit_garch(std::vector<double>(200, 1.5)), DegenerateSeriesError);
    REQUIRE_THROWS_AS(fit_garch(std::vector<double>{0.1, -0.2, 0.3}), InsufficientDataError);
}

TEST_CASE("fit on i.i.d. gaussian data recovers the unconditional variance", "[garch]") {
    Rng rng(314);
    const double sd = 0.012;
    std::vector<double> returns(3000);
    for (auto& v : returns) v = sd * rng.normal();

    double mean = 0.0;
    for (double v : returns) mean += v;
    mean /= static_cast<double>(returns.size());
    double sample_var = 0.0;
    for (double v : returns) sample_var += (v - mean) * (v - mean);
    sample_var /= static_cast<double>(returns.size() - 1);

    const auto fit = fit_garch(returns);
    const double uncond = unconditional_variance(fit.params);
    REQUIRE_THAT(uncond, WithinRel(sample_var, 0.20));
    REQUIRE(fit.params.arch_coef[0] + fit.params.garch_coef[0] < 1.0);
    for (double h : fit.h_path) REQUIRE(h > 0.0);
    REQUIRE(fit.residuals.size() == returns.size());
}

TEST_CASE("optimum beats the fixed starting points", "[garch]") {
    GarchParams truth = params11(0.05, 0.10, 0.85);
    Rng rng(99);
    const auto returns = simulate_garch(truth, GarchSpec{}, 2000, rng);
    const auto fit = fit_garch(returns);
    const double at_optimum = negative_log_likelihood(fit.params, returns, fit.spec);
    REQUIRE_THAT(at_optimum, WithinRel(-fit.loglik, 1e-12));

    double mean = 0.0;
    for (double v : returns) mean += v;
    mean /= static_cast<double>(returns.size());
    double var = 0.0;
    for (double v : returns) var += (v - mean) * (v - mean);
    var /= static_cast<double>(returns.size() - 1);
    const double profiles[3][2] = {{0.05, 0.90}, {0.10, 0.80}, {0.20, 0.60}};
    for (const auto& profile : profiles) {
        GarchParams start = params11(var * (1.0 - profile[0] - profile[1]), profile[0], profile[1], mean);
        REQUIRE(at_optimum <= negative_log_likelihood(start, returns, fit.spec) + 1e-9);
    }
}

TEST_CASE("simulated GARCH(1,1) parameters are recovered", "[garch]") {
    GarchParams truth = params11(0.05, 0.10, 0.85);
    Rng rng(7);
    const auto returns = simulate_garch(truth, GarchSpec{}, 10000, rng);
    const auto fit = fit_garch(returns);
    REQUIRE(fit.converged);
    REQUIRE_THAT(fit.params.var_const, WithinRel(truth.var_const, 0.35));
    REQUIRE_THAT(fit.params.arch_coef[0], WithinRel(truth.arch_coef[0], 0.35));
    REQUIRE_THAT(fit.params.garch_coef[0], WithinRel(truth.garch_coef[0], 0.10));
}

TEST_CASE("return scaling moves k by c^2 and leaves A, G", "[garch]") {
    GarchParams truth = params11(0.05, 0.10, 0.85);
    Rng rng(21);
    const auto returns = simulate_garch(truth, GarchSpec{}, 6000, rng);
    const double c = 10.0;
    std::vector<double> scaled(returns.size());
    for (std::size_t i = 0; i < returns.size(); ++i) scaled[i] = c * returns[i];

    const auto base = fit_garch(returns);
    const auto big = fit_garch(scaled);
    REQUIRE_THAT(big.params.var_const, WithinRel(c * c * base.params.var_const, 0.02));
    REQUIRE_THAT(big.params.arch_coef[0], WithinRel(base.params.arch_coef[0], 0.02));
    REQUIRE_THAT(big.params.garch_coef[0], WithinRel(base.params.garch_coef[0], 0.02));
}

TEST_CASE("one-step forecast closed forms", "[garch]") {
    GarchParams truth = params11(0.05, 0.10, 0.85, 0.002);
    Rng rng(40);
    const auto returns = simulate_garch(truth, GarchSpec{}, 1500, rng);
    const auto fit = fit_garch(returns);

    SECTION("constant mean forecast is the fitted constant") {
        const auto f = forecast_one_step(fit, returns);
        REQUIRE(f.mean == fit.params.mean_const);
        // variance forecast = k + A eps_n^2 + G h_n, from the stored tails
        const double expected = fit.params.var_const +
                                fit.params.arch_coef[0] * fit.residuals.back() *
                                    fit.residuals.back() +
                                fit.params.garch_coef[0] * fit.h_path.back();
        REQUIRE_THAT(f.variance, WithinRel(expected, 1e-12));
    }
    SECTION("A = G = 0 gives variance k") {
        GarchFit flat = fit;
        flat.params = params11(0.33, 0.0, 0.0, 0.001);
        const auto paths = detail::garch_paths(flat.params, returns, flat.spec);
        flat.residuals = paths.residuals;
        flat.h_path = paths.variances;
        const auto f = forecast_one_step(flat, returns);
        REQUIRE(f.mean == 0.001);
        REQUIRE(f.variance == 0.33);
    }
    SECTION("shorter series than the fit is rejected") {
        const std::vector<double> shorter(returns.begin(), returns.end() - 5);
        REQUIRE_THROWS_AS(forecast_one_step(fit, shorter), ShapeError);
    }
}

TEST_CASE("rolling forecast lengths and degenerate windows", "[garch]") {
    SECTION("605 prices with a 200-day window give 405 forecasts") {
        GarchParams truth = params11(2e-5, 0.10, 0.85);
        Rng rng(3);
        const auto rets = simulate_garch(truth, GarchSpec{}, 604, rng);
        std::vector<double> prices(605);
        prices[0] = 35.0;
        for (std::size_t i = 1; i < prices.size(); ++i)
            prices[i] = prices[i - 1] * std::exp(rets[i - 1]);
        const auto out = rolling_garch_price_forecast(prices, 200, GarchSpec{}, 2);
        REQUIRE(out.prices.size() == 405);
    }
    SECTION("constant prices forecast the constant") {
        const std::vector<double> flat(80, 42.0);
        const auto out = rolling_garch_price_forecast(flat, 60);
        REQUIRE(out.prices.size() == 20);
        for (double p : out.prices) REQUIRE(p == 42.0);
        for (bool ok : out.converged) REQUIRE_FALSE(ok);
    }
    SECTION("input validation") {
        REQUIRE_THROWS_AS(rolling_garch_price_forecast(std::vector<double>(100, 1.0), 100),
                          InsufficientDataError);
        std::vector<double> bad(120, 1.0);
        bad[3] = -2.0;
        REQUIRE_THROWS_AS(rolling_garch_price_forecast(bad, 100), DomainError);
    }
}

TEST_CASE("rolling forecast has no lookahead", "[garch]") {
    GarchParams truth = params11(2e-5, 0.08, 0.80);
    Rng rng(17);
    const auto rets = simulate_garch(truth, GarchSpec{}, 149, rng);
    std::vector<double> prices(150);
    prices[0] = 30.0;
    for (std::size_t i = 1; i < prices.size(); ++i)
        prices[i] = prices[i - 1] * std::exp(rets[i - 1]);

    const std::size_t window = 80;
    const auto base = rolling_garch_price_forecast(prices, window);

    for (std::size_t cut : {100UL, 120UL, 140UL}) {
        std::vector<double> perturbed = prices;
        for (std::size_t j = cut; j < perturbed.size(); ++j) perturbed[j] *= 1.25;
        const auto out = rolling_garch_price_forecast(perturbed, window);
        // forecast index t is for day window+t, made with data through day
        // window+t-1; unaffected while window+t <= cut
        for (std::size_t t = 0; t + window <= cut; ++t) REQUIRE(out.prices[t] == base.prices[t]);
    }
}

TEST_CASE("rolling forecast is competitive with the naive forecast", "[garch]") {
    GarchParams truth = params11(2e-5, 0.10, 0.85, 1e-4);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(800 + seed);
        const auto rets = simulate_garch(truth, GarchSpec{}, 179, rng);
        std::vector<double> prices(180);
        prices[0] = 35.0;
        for (std::size_t i = 1; i < prices.size(); ++i)
            prices[i] = prices[i - 1] * std::exp(rets[i - 1]);

        const std::size_t window = 120;
        const auto out = rolling_garch_price_forecast(prices, window, GarchSpec{}, 2);
        double mae_model = 0.0, mae_naive = 0.0;
        for (std::size_t t = 0; t < out.prices.size(); ++t) {
            mae_model += std::abs(std::log(out.prices[t] / prices[window + t]));
            mae_naive += std::abs(std::log(prices[window + t - 1] / prices[window + t]));
        }
        REQUIRE(mae_model <= 1.10 * mae_naive);
    }
}
