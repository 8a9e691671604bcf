#pragma once

#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "devpool/error.hpp"
#include "devpool/pooling.hpp"

namespace devpool {

enum class BenchStrategy { Mean, SD, MAD, DDJoint };

inline constexpr std::array<BenchStrategy, 4> bench_strategies{BenchStrategy::Mean, BenchStrategy::SD,
                                                              BenchStrategy::MAD, BenchStrategy::DDJoint};

inline std::string_view to_string(BenchStrategy s)
{
    switch (s) {
    case BenchStrategy::Mean: return "mean";
    case BenchStrategy::SD: return "sd";
    case BenchStrategy::MAD: return "mad";
    case BenchStrategy::DDJoint: return "dd-joint";
    }
    return "?";
}

struct BenchRow {
    std::size_t ls_size = 0;
    BenchStrategy strategy = BenchStrategy::Mean;
    double median_seconds = 0.0;
    std::size_t runs = 0;
};

struct BenchResult {
    std::vector<BenchRow> rows;

    [[nodiscard]] BenchRow const& at(std::size_t ls_size, BenchStrategy s) const
    {
        auto it = std::find_if(rows.begin(), rows.end(),
                               [&](BenchRow const& r) { return r.ls_size == ls_size && r.strategy == s; });
        if (it == rows.end()) {
            throw InvalidInput("no benchmark row for size " + std::to_string(ls_size));
        }
        return *it;
    }
};

struct BenchOptions {
    std::vector<std::size_t> sizes{1u << 20, 1u << 21, 1u << 22, 1u << 23, 1u << 24};
    std::size_t runs = 20;
    std::uint64_t seed = 20150401;
};

/// Physical memory in bytes, or 0 if it cannot be determined.
inline std::uint64_t physical_memory_bytes()
{
    long const pages = ::sysconf(_SC_PHYS_PAGES);
    long const page = ::sysconf(_SC_PAGE_SIZE);
    if (pages <= 0 || page <= 0) {
        return 0;
    }
    return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
}

/// Throws InvalidInput unless every size and the run count are admissible.
inline void validate_bench_options(BenchOptions const& opt)
{
    if (opt.sizes.empty()) {
        throw InvalidInput("no benchmark sizes given");
    }
    if (opt.runs < 5) {
        throw InvalidInput("benchmark needs at least 5 runs per size");
    }
    for (std::size_t i = 0; i < opt.sizes.size(); ++i) {
        if (opt.sizes[i] == 0) {
            throw InvalidInput("benchmark sizes must be at least 1");
        }
        if (i > 0 && opt.sizes[i] <= opt.sizes[i - 1]) {
            throw InvalidInput("benchmark sizes must be strictly increasing");
        }
    }
    std::size_t const largest = opt.sizes.back();
    std::uint64_t const limit = physical_memory_bytes() / 2;
    if (largest > std::numeric_limits<std::size_t>::max() / sizeof(double) ||
        (limit != 0 && largest * sizeof(double) > limit)) {
        throw InvalidInput("size " + std::to_string(largest) +
                           " would need more than half of physical memory; refusing to allocate");
    }
}

/*!
    Times Mean, SD, MAD and joint SD/MAD pooling on a fixed-seed uniform
    [0, 1] buffer of each size. Runs are strictly sequential, strategies are
    interleaved within each round, one warm-up round is discarded and the
    median of `runs` timed rounds is reported.
*/
inline BenchResult run_pooling_bench(BenchOptions const& opt)
{
    validate_bench_options(opt);
    using clock = std::chrono::steady_clock;
    static_assert(clock::is_steady);

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> buffer(opt.sizes.back());
    for (double& v : buffer) {
        v = uniform(rng);
    }

    BenchResult result;
    volatile double sink = 0.0;
    for (std::size_t size : opt.sizes) {
        std::span<double const> const ls(buffer.data(), size);
        auto run_once = [&](BenchStrategy s) {
            auto const t0 = clock::now();
            switch (s) {
            case BenchStrategy::Mean: sink = sink + mean_pool(ls).value; break;
            case BenchStrategy::SD: sink = sink + sd_pool(ls).value; break;
            case BenchStrategy::MAD: sink = sink + mad_pool(ls).value; break;
            case BenchStrategy::DDJoint: sink = sink + dd_pool_joint(ls, 0.5).dd.value; break;
            }
            return std::chrono::duration<double>(clock::now() - t0).count();
        };
        for (auto s : bench_strategies) {
            run_once(s);
        }
        std::array<std::vector<double>, bench_strategies.size()> times;
        for (std::size_t r = 0; r < opt.runs; ++r) {
            for (std::size_t k = 0; k < bench_strategies.size(); ++k) {
                times[k].push_back(run_once(bench_strategies[k]));
            }
        }
        for (std::size_t k = 0; k < bench_strategies.size(); ++k) {
            auto& t = times[k];
            std::sort(t.begin(), t.end());
            double const med = t.size() % 2 == 1 ? t[t.size() / 2] : (t[t.size() / 2 - 1] + t[t.size() / 2]) / 2.0;
            result.rows.push_back({size, bench_strategies[k], med, opt.runs});
        }
    }
    return result;
}

inline void write_bench_csv(std::ostream& out, BenchResult const& r)
{
    out << "ls_size,strategy,median_seconds,runs\n";
    char buf[64];
    for (auto const& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%.9e", row.median_seconds);
        out << row.ls_size << ',' << to_string(row.strategy) << ',' << buf << ',' << row.runs << '\n';
    }
}

} // namespace devpool
