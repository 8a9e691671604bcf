#pragma once

#include <array>
#include <cstddef>

namespace devpool {

/*!
    Pairwise (cascade) summation over the index range [first, last).

    term(i, acc) adds the contribution of element i into the K accumulators.
    Blocks of up to pairwise_block elements are summed naively and the block
    results are combined in a balanced binary tree, giving O(log n) error
    growth at essentially the cost of a plain loop. The reduction tree
    depends only on the range, so results are deterministic.
*/
inline constexpr std::size_t pairwise_block = 256;

template <std::size_t K, typename Term>
std::array<double, K> pairwise_sum(std::size_t first, std::size_t last, Term&& term)
{
    std::array<double, K> acc{};
    if (last - first <= pairwise_block) {
        for (std::size_t i = first; i < last; ++i) {
            term(i, acc);
        }
        return acc;
    }
    std::size_t const blocks = (last - first + pairwise_block - 1) / pairwise_block;
    std::size_t const mid = first + (blocks / 2) * pairwise_block;
    auto const lo = pairwise_sum<K>(first, mid, term);
    auto const hi = pairwise_sum<K>(mid, last, term);
    for (std::size_t k = 0; k < K; ++k) {
        acc[k] = lo[k] + hi[k];
    }
    return acc;
}

/// Single-accumulator convenience form: sums term(i) for i in [0, n).
template <typename Term>
double pairwise_sum(std::size_t n, Term&& term)
{
    return pairwise_sum<1>(0, n, [&](std::size_t i, std::array<double, 1>& acc) { acc[0] += term(i); })[0];
}

} // namespace devpool
