#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "carbcast/garch.hpp"
#include "carbcast/rng.hpp"
#include "carbcast/stats.hpp"

using namespace carbcast;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> gaussian_series(std::uint64_t seed, std::size_t n, double sd = 1.0) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = sd * rng.normal();
    return out;
}

std::vector<double> random_walk(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<double> out(n);
    double level = 0.0;
    for (auto& v : out) {
        level += rng.normal();
        v = level;
    }
    return out;
}

// test-local recomputation of the Jarque-Bera statistic from raw moments
double jb_reference(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        m2 += d * d / n;
        m3 += d * d * d / n;
        m4 += d * d * d * d / n;
    }
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    return n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
}

} // namespace

TEST_CASE("descriptive statistics", "[stats]") {
    const auto s = descriptive({1.0, 2.0, 3.0});
    REQUIRE(s.mean == 2.0);
    REQUIRE(s.minimum == 1.0);
    REQUIRE(s.maximum == 3.0);
    REQUIRE(s.std_dev == 1.0); // sample std, divisor N-1
    REQUIRE(s.n == 3);

    REQUIRE(descriptive({5.0, 5.0, 5.0, 5.0}).std_dev == 0.0);
    REQUIRE_THROWS_AS(descriptive({1.0}), InsufficientDataError);
}

TEST_CASE("jarque_bera exact points", "[stats]") {
    // symmetric 8-point series with sample kurtosis exactly 3:
    // {±1, ±(1+sqrt 2), four zeros}
    const double b = 1.0 + std::sqrt(2.0);
    const std::vector<double> normalish = {-b, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, b};
    const auto r = jarque_bera(normalish);
    REQUIRE_THAT(r.statistic, WithinAbs(0.0, 1e-10));
    REQUIRE_FALSE(r.reject_at_5pct);
    REQUIRE(r.critical_value == 5.99);

    // formula check of the spec'd point: n=600, S=0.5, K=3 gives 600/6 * 0.25
    const double direct = 600.0 / 6.0 * (0.5 * 0.5 + 0.25 * (3.0 - 3.0) * (3.0 - 3.0));
    REQUIRE(direct == 25.0);
}

TEST_CASE("jarque_bera matches an independent moment computation", "[stats]") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        Rng rng(seed);
        std::vector<double> x(300);
        for (auto& v : x) v = std::exp(rng.normal()); // skewed
        const auto r = jarque_bera(x);
        REQUIRE_THAT(r.statistic, WithinRel(jb_reference(x), 1e-12));
        REQUIRE(r.reject_at_5pct == (r.statistic > 5.99));
    }
}

TEST_CASE("jarque_bera is invariant under affine transforms", "[stats]") {
    const auto x = gaussian_series(7, 200);
    const auto base = jarque_bera(x).statistic;
    for (double a : {2.5, -3.0, 0.1}) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + 17.0;
        REQUIRE_THAT(jarque_bera(y).statistic, WithinRel(base, 1e-9));
    }
}

TEST_CASE("jarque_bera degenerate inputs", "[stats]") {
    REQUIRE_THROWS_AS(jarque_bera({1, 1, 1, 1, 1, 1, 1, 1}), DegenerateSeriesError);
    REQUIRE_THROWS_AS(jarque_bera({1, 2, 3}), InsufficientDataError);
}

TEST_CASE("jarque_bera keeps normal samples in 90 of 100 seeds", "[stats]") {
    int accepted = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        if (!jarque_bera(gaussian_series(1000 + seed, 1000)).reject_at_5pct) ++accepted;
    REQUIRE(accepted >= 90);
}

TEST_CASE("chi-square tail matches frozen scipy values", "[stats]") {
    // scipy.stats.chi2.sf reference values
    REQUIRE_THAT(detail::chi_square_sf(25.0, 12), WithinRel(0.0148228745974416, 1e-10));
    REQUIRE_THAT(detail::chi_square_sf(5.99, 2), WithinRel(0.0500366270865863, 1e-10));
    REQUIRE_THAT(detail::chi_square_sf(10.0, 12), WithinRel(0.615960654833063, 1e-10));
    REQUIRE_THAT(detail::chi_square_sf(30.0, 12), WithinRel(0.00279242933270091, 1e-10));
    REQUIRE_THAT(detail::chi_square_sf(3.0, 2), WithinRel(0.22313016014843, 1e-10));
    REQUIRE_THAT(detail::chi_square_sf(1.0, 1), WithinRel(0.317310507862911, 1e-10));
    REQUIRE_THAT(detail::chi_square_sf(50.0, 12), WithinRel(1.39711210754286e-06, 1e-9));
}

TEST_CASE("adf_test statistical behavior over seeds", "[stats]") {
    int noise_rejected = 0, walk_retained = 0, diff_rejected = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        if (adf_test(gaussian_series(seed, 500)).reject_at_5pct) ++noise_rejected;

        const auto walk = random_walk(500 + seed, 500);
        if (!adf_test(walk).reject_at_5pct) ++walk_retained;

        std::vector<double> diff(walk.size() - 1);
        for (std::size_t i = 1; i < walk.size(); ++i) diff[i - 1] = walk[i] - walk[i - 1];
        if (adf_test(diff).reject_at_5pct) ++diff_rejected;
    }
    REQUIRE(noise_rejected >= 95);
    REQUIRE(walk_retained >= 90);
    REQUIRE(diff_rejected >= 95);
}

TEST_CASE("adf_test input validation", "[stats]") {
    REQUIRE_THROWS_AS(adf_test(std::vector<double>{1, 2, 3, 4}, 5), InsufficientDataError);
}

TEST_CASE("arch_lm detects conditional heteroskedasticity", "[stats]") {
    GarchParams params;
    params.var_const = 0.05;
    params.arch_coef = {0.10};
    params.garch_coef = {0.85};

    int garch_rejected_1pct = 0, gauss_accepted = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const auto sim = simulate_garch(params, GarchSpec{}, 2000, rng);
        if (*arch_lm(sim, 12).p_value < 0.01) ++garch_rejected_1pct;

        if (*arch_lm(gaussian_series(900 + seed, 1000), 12).p_value > 0.05) ++gauss_accepted;
    }
    REQUIRE(garch_rejected_1pct >= 95);
    REQUIRE(gauss_accepted >= 90);
}

TEST_CASE("arch_lm scale invariance and errors", "[stats]") {
    const auto x = gaussian_series(11, 400);
    const auto base = arch_lm(x, 12).statistic;
    std::vector<double> scaled(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = 250.0 * x[i];
    REQUIRE_THAT(arch_lm(scaled, 12).statistic, WithinRel(base, 1e-9));

    REQUIRE_THROWS_AS(arch_lm(std::vector<double>(100, 3.14), 12), DegenerateSeriesError);
    REQUIRE_THROWS_AS(arch_lm(gaussian_series(1, 20), 12), InsufficientDataError);
}

TEST_CASE("test statistics are deterministic", "[stats]") {
    const auto x = gaussian_series(5, 300);
    REQUIRE(jarque_bera(x).statistic == jarque_bera(x).statistic);
    REQUIRE(adf_test(x).statistic == adf_test(x).statistic);
    REQUIRE(arch_lm(x).statistic == arch_lm(x).statistic);
}
