#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace carbcast {

struct SimplexOptions {
    double initial_step = 0.25;   // per-coordinate displacement of the initial simplex
    double diameter_tol = 1e-8;   // converged when the simplex diameter falls below this
    std::size_t max_iterations = 2000;
};

struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/**
 * Derivative-free Nelder-Mead simplex minimizer. Deterministic: the search
 * path depends only on the starting point and options.
 */
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& start,
                                 const SimplexOptions& opt = {}) {
    const std::size_t dim = start.size();
    const std::size_t m = dim + 1;

    std::vector<std::vector<double>> verts(m, start);
    for (std::size_t i = 0; i < dim; ++i)
        verts[i + 1][i] += (start[i] != 0.0 ? opt.initial_step * std::abs(start[i]) : opt.initial_step);

    std::vector<double> fvals(m);
    for (std::size_t i = 0; i < m; ++i) fvals[i] = f(verts[i]);

    std::vector<std::size_t> order(m);
    auto sort_vertices = [&] {
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    };
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t i = 1; i < m; ++i)
            for (std::size_t c = 0; c < dim; ++c)
                d = std::max(d, std::abs(verts[i][c] - verts[0][c]));
        return d;
    };

    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

    SimplexResult result;
    for (result.iterations = 0; result.iterations < opt.max_iterations; ++result.iterations) {
        sort_vertices();
        if (diameter() < opt.diameter_tol) {
            result.converged = true;
            break;
        }
        const std::size_t best = order[0];
        const std::size_t worst = order[m - 1];
        const std::size_t second_worst = order[m - 2];

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == worst) continue;
            for (std::size_t c = 0; c < dim; ++c) centroid[c] += verts[i][c];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto blend = [&](double coef) {
            std::vector<double> p(dim);
            for (std::size_t c = 0; c < dim; ++c)
                p[c] = centroid[c] + coef * (centroid[c] - verts[worst][c]);
            return p;
        };

        const auto reflected = blend(kReflect);
        const double f_reflected = f(reflected);
        if (f_reflected < fvals[best]) {
            const auto expanded = blend(kExpand);
            const double f_expanded = f(expanded);
            if (f_expanded < f_reflected) {
                verts[worst] = expanded;
                fvals[worst] = f_expanded;
            } else {
                verts[worst] = reflected;
                fvals[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < fvals[second_worst]) {
            verts[worst] = reflected;
            fvals[worst] = f_reflected;
            continue;
        }
        const auto contracted = blend(f_reflected < fvals[worst] ? kContract : -kContract);
        const double f_contracted = f(contracted);
        if (f_contracted < std::min(f_reflected, fvals[worst])) {
            verts[worst] = contracted;
            fvals[worst] = f_contracted;
            continue;
        }
        // shrink toward the best vertex
        for (std::size_t i = 0; i < m; ++i) {
            if (i == best) continue;
            for (std::size_t c = 0; c < dim; ++c)
                verts[i][c] = verts[best][c] + kShrink * (verts[i][c] - verts[best][c]);
            fvals[i] = f(verts[i]);
        }
    }

    sort_vertices();
    result.x = verts[order[0]];
    result.fx = fvals[order[0]];
    return result;
}

} // namespace carbcast
