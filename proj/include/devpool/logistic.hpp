#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "devpool/error.hpp"
#include "devpool/nelder_mead.hpp"
#include "devpool/statistics.hpp"

namespace devpool {

/*!
    q(s) = (beta1 - beta2) / (1 + exp(-(s - beta3) / |beta4|)) + beta2

    Evaluated in the equivalent form
    (beta1 + beta2) / 2 + (beta1 - beta2) / 2 * tanh((s - beta3) / (2 |beta4|)),
    which stays accurate when the asymptotes are large and nearly cancel.
*/
struct LogisticParams {
    std::array<double, 4> beta{};
    bool converged = false;
    std::size_t iterations = 0; // objective evaluations spent by the simplex search

    [[nodiscard]] double operator()(double s) const
    {
        return eval(beta[0] + beta[1], beta[0] - beta[1], beta[2], beta[3], s);
    }

    /// sum = beta1 + beta2, diff = beta1 - beta2.
    [[nodiscard]] static double eval(double sum, double diff, double center, double width, double s)
    {
        return 0.5 * sum + 0.5 * diff * std::tanh((s - center) / (2.0 * std::abs(width)));
    }

    [[nodiscard]] std::vector<double> map(std::span<double const> s) const
    {
        std::vector<double> out(s.size());
        std::transform(s.begin(), s.end(), out.begin(), [&](double v) { return (*this)(v); });
        return out;
    }
};

namespace detail {

inline void require_fit_input(std::span<double const> objective, std::span<double const> mos)
{
    if (objective.size() != mos.size()) {
        throw InvalidInput("objective and subjective scores differ in length");
    }
    if (objective.size() < 5) {
        throw InvalidInput("logistic fitting needs at least 5 points");
    }
    auto const [lo, hi] = std::minmax_element(objective.begin(), objective.end());
    if (*lo == *hi) {
        throw InvalidInput("logistic fitting needs a non-constant objective score");
    }
    for (std::size_t i = 0; i < mos.size(); ++i) {
        if (!std::isfinite(objective[i]) || !std::isfinite(mos[i])) {
            throw InvalidInput("logistic fitting needs finite scores");
        }
    }
}

inline double population_std(std::span<double const> v)
{
    double const m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(v.size()));
}

inline double median_of(std::span<double const> v)
{
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    std::size_t const n = s.size();
    return n % 2 == 1 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2.0;
}

} // namespace detail

/*!
    Starting point of the fit: beta1 = max MOS, beta2 = min MOS,
    beta3 = median objective, beta4 = objective std / 4. The two asymptotes
    are swapped when objective and MOS are negatively rank-correlated, so
    the initial curve already runs in the right direction.
*/
inline LogisticParams logistic_initial_guess(std::span<double const> objective, std::span<double const> mos)
{
    detail::require_fit_input(objective, mos);
    auto const [lo, hi] = std::minmax_element(mos.begin(), mos.end());
    LogisticParams p;
    p.beta = {*hi, *lo, detail::median_of(objective), detail::population_std(objective) / 4.0};
    bool const decreasing = *lo != *hi && spearman(objective, mos) < 0.0;
    if (decreasing) {
        std::swap(p.beta[0], p.beta[1]);
    }
    return p;
}

namespace detail {

// Logistic in slope form: m0 + k * x * tanh(z) / z with x = s - center and
// z = curvature * x / 2. It equals the four-parameter curve with
// beta4 = 1 / |curvature|, beta1 - beta2 = 4 k / |curvature| and midpoint m0,
// and reduces continuously to the line m0 + k x as curvature -> 0.
inline double logistic_slope_form(double m0, double k, double center, double curvature, double s)
{
    double const x = s - center;
    double const z = 0.5 * curvature * x;
    double const ratio = std::abs(z) < 1e-5 ? 1.0 - z * z / 3.0 : std::tanh(z) / z;
    return m0 + k * x * ratio;
}

} // namespace detail

/*!
    Least-squares fit of the 4-parameter logistic by Nelder-Mead.

    The search runs over (midpoint, slope at the centre, centre, inverse
    width), scaled by the MOS range and objective spread, so that a nearly
    linear relationship is a finite point of the search space rather than a
    limit at infinite beta. It restarts from its best point until a restart
    no longer improves the residual. Failure to converge is reported through
    `converged`; the best parameters found are returned either way.
*/
inline LogisticParams fit_logistic(std::span<double const> objective, std::span<double const> mos)
{
    LogisticParams const init = logistic_initial_guess(objective, mos);
    auto const [lo, hi] = std::minmax_element(mos.begin(), mos.end());
    auto const [smin, smax] = std::minmax_element(objective.begin(), objective.end());
    double const mos_scale = *hi > *lo ? *hi - *lo : 1.0;
    double const obj_scale = detail::population_std(objective);

    double const w0 = 1.0 / init.beta[3];
    std::array<double, 4> const origin{(init.beta[0] + init.beta[1]) / 2.0, (init.beta[0] - init.beta[1]) * w0 / 4.0,
                                       init.beta[2], w0};
    std::array<double, 4> const scale{mos_scale, mos_scale / obj_scale, obj_scale, 1.0 / obj_scale};
    auto coords = [&](std::array<double, 4> const& u) {
        std::array<double, 4> c{};
        for (std::size_t i = 0; i < 4; ++i) {
            c[i] = origin[i] + scale[i] * u[i];
        }
        return c;
    };
    auto mse = [&](std::array<double, 4> const& u) {
        auto const c = coords(u);
        double ss = 0.0;
        for (std::size_t i = 0; i < objective.size(); ++i) {
            double const r = detail::logistic_slope_form(c[0], c[1], c[2], c[3], objective[i]) - mos[i];
            ss += r * r;
        }
        return ss / static_cast<double>(objective.size());
    };

    constexpr int max_restarts = 50;
    NelderMeadOptions opt;
    std::array<double, 4> u{};
    double best = mse(u);
    std::size_t evaluations = 1;
    bool converged = false;
    for (int restart = 0; restart < max_restarts; ++restart) {
        auto const r = nelder_mead(mse, u, {0.1, 0.1, 0.1, 0.1}, opt);
        evaluations += r.evaluations;
        bool const improved = r.value < best * (1.0 - 1e-12);
        if (r.value <= best) {
            u = r.x;
            best = r.value;
        }
        if (r.converged && !improved) {
            converged = true;
            break;
        }
    }

    auto c = coords(u);
    // A practically straight fit is re-expressed about the middle of the data
    // with a curvature small enough to be invisible there yet large enough
    // that the asymptotes stay representable.
    double const half_range = (*smax - *smin) / 2.0;
    double const min_curvature = 1e-5 / half_range;
    if (std::abs(c[3]) < min_curvature) {
        double const mid = (*smin + *smax) / 2.0;
        c[0] = detail::logistic_slope_form(c[0], c[1], c[2], c[3], mid);
        c[2] = mid;
        c[3] = min_curvature;
    }
    double const amplitude = 4.0 * c[1] / std::abs(c[3]);

    LogisticParams out;
    out.beta = {c[0] + amplitude / 2.0, c[0] - amplitude / 2.0, c[2], 1.0 / std::abs(c[3])};
    out.converged = converged && std::isfinite(best);
    out.iterations = evaluations;
    return out;
}

} // namespace devpool
