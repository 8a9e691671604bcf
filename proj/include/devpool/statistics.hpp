#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "devpool/error.hpp"

namespace devpool {

namespace detail {

inline void require_paired(std::span<double const> x, std::span<double const> y, std::size_t min_n)
{
    if (x.size() != y.size()) {
        throw InvalidInput("series differ in length");
    }
    if (x.size() < min_n) {
        throw InvalidInput("need at least " + std::to_string(min_n) + " paired values");
    }
}

} // namespace detail

/// 1-based fractional ranks; tied values share the average of their positions.
inline std::vector<double> average_ranks(std::span<double const> x)
{
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) {
            ++j;
        }
        double const r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

/// Product-moment correlation, clamped to [-1, 1].
inline double pearson(std::span<double const> x, std::span<double const> y)
{
    detail::require_paired(x, y, 2);
    auto const n = static_cast<double>(x.size());
    double const mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double const my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double const dx = x[i] - mx;
        double const dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw UndefinedCorrelation("correlation of a constant series is undefined");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Pearson correlation of average ranks.
inline double spearman(std::span<double const> x, std::span<double const> y)
{
    detail::require_paired(x, y, 2);
    auto const rx = average_ranks(x);
    auto const ry = average_ranks(y);
    return pearson(rx, ry);
}

inline double rmse(std::span<double const> pred, std::span<double const> target)
{
    detail::require_paired(pred, target, 1);
    double ss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double const r = pred[i] - target[i];
        ss += r * r;
    }
    return std::sqrt(ss / static_cast<double>(pred.size()));
}

} // namespace devpool
