#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace devpool {

struct NelderMeadOptions {
    std::size_t max_evaluations = 20000;
    /// Stop once the simplex's function values agree to this relative spread...
    double f_tolerance = 1e-14;
    /// ...and its vertices lie within this distance of the best one.
    double x_tolerance = 1e-10;
};

template <std::size_t N>
struct NelderMeadResult {
    std::array<double, N> x{};
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/*!
    Downhill simplex minimization with the standard coefficients
    (reflection 1, expansion 2, contraction 1/2, shrink 1/2).

    The initial simplex is start plus one vertex per axis displaced by step[i].
    The best vertex found is always returned, converged or not.
*/
template <std::size_t N, typename F>
NelderMeadResult<N> nelder_mead(F&& f, std::array<double, N> const& start, std::array<double, N> const& step,
                                NelderMeadOptions const& opt = {})
{
    using Point = std::array<double, N>;
    std::array<Point, N + 1> pts{};
    std::array<double, N + 1> vals{};
    std::size_t evals = 0;
    auto eval = [&](Point const& p) {
        ++evals;
        double const v = f(p);
        return std::isnan(v) ? HUGE_VAL : v;
    };

    pts[0] = start;
    for (std::size_t i = 0; i < N; ++i) {
        pts[i + 1] = start;
        pts[i + 1][i] += step[i];
    }
    for (std::size_t i = 0; i <= N; ++i) {
        vals[i] = eval(pts[i]);
    }

    std::array<std::size_t, N + 1> order{};
    auto sort_vertices = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::array<Point, N + 1> p2{};
        std::array<double, N + 1> v2{};
        for (std::size_t i = 0; i <= N; ++i) {
            p2[i] = pts[order[i]];
            v2[i] = vals[order[i]];
        }
        pts = p2;
        vals = v2;
    };
    auto lerp = [](Point const& from, Point const& to, double t) {
        Point p{};
        for (std::size_t i = 0; i < N; ++i) {
            p[i] = from[i] + t * (to[i] - from[i]);
        }
        return p;
    };

    bool converged = false;
    while (evals < opt.max_evaluations) {
        sort_vertices();
        double const spread = std::abs(vals[N] - vals[0]);
        double size = 0.0;
        for (std::size_t i = 1; i <= N; ++i) {
            for (std::size_t k = 0; k < N; ++k) {
                size = std::max(size, std::abs(pts[i][k] - pts[0][k]));
            }
        }
        if (spread <= opt.f_tolerance * (std::abs(vals[0]) + opt.f_tolerance) && size <= opt.x_tolerance) {
            converged = true;
            break;
        }

        Point centroid{};
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < N; ++k) {
                centroid[k] += pts[i][k] / static_cast<double>(N);
            }
        }
        Point const reflected = lerp(centroid, pts[N], -1.0);
        double const fr = eval(reflected);
        if (fr < vals[0]) {
            Point const expanded = lerp(centroid, pts[N], -2.0);
            double const fe = eval(expanded);
            if (fe < fr) {
                pts[N] = expanded;
                vals[N] = fe;
            } else {
                pts[N] = reflected;
                vals[N] = fr;
            }
        } else if (fr < vals[N - 1]) {
            pts[N] = reflected;
            vals[N] = fr;
        } else {
            bool const outside = fr < vals[N];
            Point const contracted = lerp(centroid, outside ? reflected : pts[N], 0.5);
            double const fc = eval(contracted);
            if (fc < (outside ? fr : vals[N])) {
                pts[N] = contracted;
                vals[N] = fc;
            } else {
                for (std::size_t i = 1; i <= N; ++i) {
                    pts[i] = lerp(pts[0], pts[i], 0.5);
                    vals[i] = eval(pts[i]);
                }
            }
        }
    }
    sort_vertices();
    return NelderMeadResult<N>{pts[0], vals[0], evals, converged};
}

} // namespace devpool
