#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "devpool/error.hpp"
#include "devpool/raster.hpp"
#include "devpool/summation.hpp"

namespace devpool {

enum class Strategy { Mean, WeightedMean, SD, MAD, DD, MinkowskiDeviation };

/// Central tendency about which Minkowski deviations are measured.
enum class CentralTendency { Mean, Median };

/*!
    Which reduction to apply to a local-similarity map, plus its parameters.

    alpha is read only by DD, rho and mct only by MinkowskiDeviation, and
    weights only by WeightedMean.
*/
struct PoolingSpec {
    Strategy strategy = Strategy::Mean;
    double alpha = 0.5;
    double rho = 2.0;
    CentralTendency mct = CentralTendency::Mean;
    std::shared_ptr<ScalarField const> weights = nullptr;

    static PoolingSpec mean() { return {}; }
    static PoolingSpec sd() { return {.strategy = Strategy::SD}; }
    static PoolingSpec mad() { return {.strategy = Strategy::MAD}; }
    static PoolingSpec dd(double alpha) { return {.strategy = Strategy::DD, .alpha = alpha}; }

    static PoolingSpec minkowski(double rho, CentralTendency mct = CentralTendency::Mean)
    {
        return {.strategy = Strategy::MinkowskiDeviation, .rho = rho, .mct = mct};
    }

    static PoolingSpec weighted_mean(ScalarField weights)
    {
        return {.strategy = Strategy::WeightedMean,
                .weights = std::make_shared<ScalarField const>(std::move(weights))};
    }

    [[nodiscard]] bool is_deviation() const noexcept
    {
        return strategy != Strategy::Mean && strategy != Strategy::WeightedMean;
    }

    void validate() const
    {
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            throw InvalidInput("alpha must lie in [0, 1]");
        }
        if (!(rho >= 1.0) || !std::isfinite(rho)) {
            throw InvalidInput("rho must be finite and >= 1");
        }
        if (strategy == Strategy::WeightedMean && !weights) {
            throw InvalidInput("weighted mean pooling needs a weight field");
        }
    }
};

struct PooledScore {
    double value = 0.0;
    PoolingSpec spec;
    std::size_t n = 0;
};

/// The three scores of a joint SD/MAD pass.
struct JointDeviation {
    PooledScore mad;
    PooledScore sd;
    PooledScore dd;
};

inline std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::Mean: return "mean";
    case Strategy::WeightedMean: return "weighted-mean";
    case Strategy::SD: return "sd";
    case Strategy::MAD: return "mad";
    case Strategy::DD: return "dd";
    case Strategy::MinkowskiDeviation: return "minkowski";
    }
    return "?";
}

inline std::string_view to_string(CentralTendency m)
{
    return m == CentralTendency::Mean ? "mean" : "median";
}

inline Strategy parse_strategy(std::string_view s)
{
    for (auto st : {Strategy::Mean, Strategy::WeightedMean, Strategy::SD, Strategy::MAD, Strategy::DD,
                    Strategy::MinkowskiDeviation}) {
        if (s == to_string(st)) {
            return st;
        }
    }
    throw InvalidInput("unknown pooling strategy '" + std::string(s) + "'");
}

inline CentralTendency parse_central_tendency(std::string_view s)
{
    if (s == "mean") {
        return CentralTendency::Mean;
    }
    if (s == "median") {
        return CentralTendency::Median;
    }
    throw InvalidInput("unknown central tendency '" + std::string(s) + "'");
}

namespace detail {

inline void require_values(std::span<double const> ls)
{
    if (ls.empty()) {
        throw EmptyInput("cannot pool an empty list");
    }
    for (double v : ls) {
        if (!std::isfinite(v)) {
            throw InvalidInput("pooled values must be finite");
        }
    }
}

// Mean computed about the first element: a constant list yields that constant
// exactly, so every deviation pooling of it is exactly zero.
inline double shifted_mean(std::span<double const> ls)
{
    double const pivot = ls.front();
    double const s = pairwise_sum(ls.size(), [&](std::size_t i) { return ls[i] - pivot; });
    return pivot + s / static_cast<double>(ls.size());
}

inline double median(std::span<double const> ls)
{
    std::vector<double> v(ls.begin(), ls.end());
    auto const mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double const upper = *mid;
    if (v.size() % 2 == 1) {
        return upper;
    }
    double const lower = *std::max_element(v.begin(), mid);
    return lower + (upper - lower) / 2.0;
}

inline PooledScore make_score(double value, PoolingSpec spec, std::size_t n)
{
    return PooledScore{value, std::move(spec), n};
}

} // namespace detail

inline PooledScore mean_pool(std::span<double const> ls)
{
    detail::require_values(ls);
    return detail::make_score(detail::shifted_mean(ls), PoolingSpec::mean(), ls.size());
}

/// Sum(ls * w) / Sum(w).
inline PooledScore weighted_mean_pool(std::span<double const> ls, std::span<double const> w)
{
    detail::require_values(ls);
    if (w.size() != ls.size()) {
        throw InvalidInput("weights and values differ in length");
    }
    for (double x : w) {
        if (!std::isfinite(x) || x < 0.0) {
            throw InvalidInput("weights must be finite and non-negative");
        }
    }
    auto const sums = pairwise_sum<2>(0, ls.size(), [&](std::size_t i, std::array<double, 2>& acc) {
        acc[0] += ls[i] * w[i];
        acc[1] += w[i];
    });
    if (!(sums[1] > 0.0)) {
        throw DegenerateWeights("weights sum to zero");
    }
    PoolingSpec spec{.strategy = Strategy::WeightedMean};
    return detail::make_score(sums[0] / sums[1], std::move(spec), ls.size());
}

/// Population standard deviation (divisor N).
inline PooledScore sd_pool(std::span<double const> ls)
{
    detail::require_values(ls);
    double const m = detail::shifted_mean(ls);
    double const ss = pairwise_sum(ls.size(), [&](std::size_t i) {
        double const d = ls[i] - m;
        return d * d;
    });
    return detail::make_score(std::sqrt(ss / static_cast<double>(ls.size())), PoolingSpec::sd(), ls.size());
}

/// Mean absolute deviation about the mean.
inline PooledScore mad_pool(std::span<double const> ls)
{
    detail::require_values(ls);
    double const m = detail::shifted_mean(ls);
    double const sa = pairwise_sum(ls.size(), [&](std::size_t i) { return std::abs(ls[i] - m); });
    return detail::make_score(sa / static_cast<double>(ls.size()), PoolingSpec::mad(), ls.size());
}

/*!
    MAD, SD and their blend alpha * SD + (1 - alpha) * MAD from one pass over
    the absolute deviations D_i = |LS(i) - mean|.
*/
inline JointDeviation dd_pool_joint(std::span<double const> ls, double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw InvalidInput("alpha must lie in [0, 1]");
    }
    detail::require_values(ls);
    double const m = detail::shifted_mean(ls);
    auto const sums = pairwise_sum<2>(0, ls.size(), [&](std::size_t i, std::array<double, 2>& acc) {
        double const d = std::abs(ls[i] - m);
        acc[0] += d;
        acc[1] += d * d;
    });
    auto const n = static_cast<double>(ls.size());
    double const mad = sums[0] / n;
    double const sd = std::sqrt(sums[1] / n);
    return JointDeviation{
        detail::make_score(mad, PoolingSpec::mad(), ls.size()),
        detail::make_score(sd, PoolingSpec::sd(), ls.size()),
        detail::make_score(alpha * sd + (1.0 - alpha) * mad, PoolingSpec::dd(alpha), ls.size()),
    };
}

/// (1/N Sum |x_i - MCT|^rho)^(1/rho) for rho >= 1.
inline PooledScore minkowski_deviation_pool(std::span<double const> ls, double rho,
                                            CentralTendency mct = CentralTendency::Mean)
{
    if (!(rho >= 1.0) || !std::isfinite(rho)) {
        throw InvalidInput("rho must be finite and >= 1");
    }
    detail::require_values(ls);
    double const center = mct == CentralTendency::Mean ? detail::shifted_mean(ls) : detail::median(ls);
    double const s = pairwise_sum(ls.size(), [&](std::size_t i) { return std::pow(std::abs(ls[i] - center), rho); });
    double const value = std::pow(s / static_cast<double>(ls.size()), 1.0 / rho);
    return detail::make_score(value, PoolingSpec::minkowski(rho, mct), ls.size());
}

/// Dispatches on spec.strategy; the returned score echoes the full spec.
inline PooledScore pool(std::span<double const> ls, PoolingSpec const& spec)
{
    spec.validate();
    PooledScore out;
    switch (spec.strategy) {
    case Strategy::Mean: out = mean_pool(ls); break;
    case Strategy::WeightedMean: out = weighted_mean_pool(ls, spec.weights->values()); break;
    case Strategy::SD: out = sd_pool(ls); break;
    case Strategy::MAD: out = mad_pool(ls); break;
    case Strategy::DD: out = dd_pool_joint(ls, spec.alpha).dd; break;
    case Strategy::MinkowskiDeviation: out = minkowski_deviation_pool(ls, spec.rho, spec.mct); break;
    }
    out.spec = spec;
    return out;
}

/// Pools a field in row-major order; weights, if any, must match its shape.
inline PooledScore pool(ScalarField const& ls, PoolingSpec const& spec)
{
    if (spec.strategy == Strategy::WeightedMean && spec.weights && !spec.weights->same_shape(ls)) {
        throw InvalidInput("weight field dimensions do not match the similarity map");
    }
    return pool(ls.values(), spec);
}

} // namespace devpool
