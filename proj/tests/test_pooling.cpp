#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "devpool/pooling.hpp"
#include "devpool/summation.hpp"
#include "oracle/reference.hpp"
#include "support/fixtures.hpp"

using namespace devpool;

namespace {

// Frozen from tests/oracle/hand_values.py (exact rationals / mpmath).
constexpr double mad_001 = 0.44444444444444444;   // 4/9
constexpr double sd_001 = 0.47140452079103168;    // sqrt(2)/3
constexpr double dd05_001 = 0.45792448261773806;  // (4/9 + sqrt(2)/3) / 2
constexpr double mink3_001 = 0.49793386072857386; // (10/81)^(1/3)

std::vector<double> const zzo{0.0, 0.0, 1.0};

double rel_err(double a, double b)
{
    double const scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::vector<double> random_list(std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::size_t> len(1, 2000);
    return test::random_values(len(rng), rng, -1e3, 1e3);
}

} // namespace

TEST(MeanPool, Examples)
{
    EXPECT_EQ(mean_pool(std::vector<double>{2.5, 2.5, 2.5}).value, 2.5);
    EXPECT_EQ(mean_pool(std::vector<double>{0, 1}).value, 0.5);
    EXPECT_NEAR(mean_pool(zzo).value, 1.0 / 3.0, 1e-15);
    EXPECT_EQ(mean_pool(zzo).n, 3u);
}

TEST(Pooling, EmptyAndNonFinite)
{
    std::vector<double> const empty;
    EXPECT_THROW(mean_pool(empty), EmptyInput);
    EXPECT_THROW(sd_pool(empty), EmptyInput);
    EXPECT_THROW(mad_pool(empty), EmptyInput);
    EXPECT_THROW(dd_pool_joint(empty, 0.5), EmptyInput);
    EXPECT_THROW(minkowski_deviation_pool(empty, 2.0), EmptyInput);
    EXPECT_THROW(mean_pool(std::vector<double>{1.0, NAN}), InvalidInput);
}

TEST(WeightedMeanPool, Examples)
{
    std::vector<double> const ls{0.3, 0.9, 0.4, 0.1};
    EXPECT_NEAR(weighted_mean_pool(ls, std::vector<double>(4, 2.0)).value, mean_pool(ls).value, 1e-15);
    EXPECT_EQ(weighted_mean_pool(std::vector<double>{0, 1}, std::vector<double>{0, 5}).value, 1.0);
    EXPECT_EQ(weighted_mean_pool(std::vector<double>{2, 4}, std::vector<double>{1, 3}).value, 3.5);
}

TEST(WeightedMeanPool, Errors)
{
    EXPECT_THROW(weighted_mean_pool(std::vector<double>{1, 2}, std::vector<double>{0, 0}), DegenerateWeights);
    EXPECT_THROW(weighted_mean_pool(std::vector<double>{1, 2}, std::vector<double>{1}), InvalidInput);
    EXPECT_THROW(weighted_mean_pool(std::vector<double>{1, 2}, std::vector<double>{1, -1}), InvalidInput);
}

TEST(SdPool, Examples)
{
    EXPECT_EQ(sd_pool(std::vector<double>(7, 0.3)).value, 0.0);
    EXPECT_EQ(sd_pool(std::vector<double>{0, 1}).value, 0.5);
    EXPECT_NEAR(sd_pool(zzo).value, sd_001, 1e-15);
}

TEST(MadPool, Examples)
{
    EXPECT_EQ(mad_pool(std::vector<double>(7, 0.3)).value, 0.0);
    EXPECT_EQ(mad_pool(std::vector<double>{0, 1}).value, 0.5);
    EXPECT_NEAR(mad_pool(zzo).value, mad_001, 1e-15);
}

TEST(DdPoolJoint, Examples)
{
    auto const j = dd_pool_joint(zzo, 0.5);
    EXPECT_NEAR(j.dd.value, dd05_001, 1e-15);
    EXPECT_NEAR(j.mad.value, mad_001, 1e-15);
    EXPECT_NEAR(j.sd.value, sd_001, 1e-15);
    EXPECT_EQ(j.dd.spec.strategy, Strategy::DD);
    EXPECT_EQ(j.dd.spec.alpha, 0.5);
}

TEST(DdPoolJoint, AlphaOutOfRange)
{
    EXPECT_THROW(dd_pool_joint(zzo, -0.01), InvalidInput);
    EXPECT_THROW(dd_pool_joint(zzo, 1.01), InvalidInput);
    EXPECT_THROW(dd_pool_joint(zzo, NAN), InvalidInput);
}

TEST(MinkowskiPool, Examples)
{
    EXPECT_NEAR(minkowski_deviation_pool(zzo, 3.0).value, mink3_001, 1e-15);
    EXPECT_NEAR(minkowski_deviation_pool(zzo, 1.0).value, mad_001, 1e-15);
    EXPECT_NEAR(minkowski_deviation_pool(zzo, 2.0).value, sd_001, 1e-15);
    // Median of [0,0,1] is 0, so deviations are [0,0,1].
    EXPECT_NEAR(minkowski_deviation_pool(zzo, 2.0, CentralTendency::Median).value, std::sqrt(1.0 / 3.0), 1e-15);
    // Even length: median is the mean of the middle two.
    EXPECT_NEAR(minkowski_deviation_pool(std::vector<double>{4, 1, 3, 0}, 1.0, CentralTendency::Median).value,
                1.5, 1e-15); // median 2, deviations 2, 1, 1, 2
}

TEST(MinkowskiPool, RhoBelowOne)
{
    EXPECT_THROW(minkowski_deviation_pool(zzo, 0.5), InvalidInput);
    EXPECT_THROW(minkowski_deviation_pool(zzo, NAN), InvalidInput);
}

TEST(Pooling, SingleElementDeviationsAreZero)
{
    std::vector<double> const one{0.37};
    EXPECT_EQ(sd_pool(one).value, 0.0);
    EXPECT_EQ(mad_pool(one).value, 0.0);
    EXPECT_EQ(dd_pool_joint(one, 0.3).dd.value, 0.0);
    EXPECT_EQ(minkowski_deviation_pool(one, 3.0).value, 0.0);
    EXPECT_EQ(minkowski_deviation_pool(one, 3.0, CentralTendency::Median).value, 0.0);
}

TEST(Pool, Dispatch)
{
    ScalarField const constant(4, 3, 0.8);
    EXPECT_EQ(pool(constant, PoolingSpec::mean()).value, 0.8);
    EXPECT_EQ(pool(constant, PoolingSpec::sd()).value, 0.0);
    auto const dd = pool(zzo, PoolingSpec::dd(0.5));
    EXPECT_NEAR(dd.value, dd05_001, 1e-15);
    EXPECT_EQ(dd.spec.strategy, Strategy::DD);
    EXPECT_NEAR(pool(zzo, PoolingSpec::minkowski(3.0)).value, mink3_001, 1e-15);
    EXPECT_NEAR(pool(zzo, PoolingSpec::mad()).value, mad_001, 1e-15);

    ScalarField const ls(2, 1, {2.0, 4.0});
    EXPECT_EQ(pool(ls, PoolingSpec::weighted_mean(ScalarField(2, 1, {1.0, 3.0}))).value, 3.5);
    EXPECT_THROW(pool(ls, PoolingSpec::weighted_mean(ScalarField(1, 2, {1.0, 3.0}))), InvalidInput);
    EXPECT_THROW(pool(ls, PoolingSpec{.strategy = Strategy::WeightedMean}), InvalidInput);
    EXPECT_THROW(pool(ls, PoolingSpec::dd(2.0)), InvalidInput);
    EXPECT_THROW(pool(ls, PoolingSpec::minkowski(0.9)), InvalidInput);
}

TEST(Pool, ParseNames)
{
    for (auto s : {Strategy::Mean, Strategy::WeightedMean, Strategy::SD, Strategy::MAD, Strategy::DD,
                   Strategy::MinkowskiDeviation}) {
        EXPECT_EQ(parse_strategy(to_string(s)), s);
    }
    EXPECT_THROW(parse_strategy("median-absolute"), InvalidInput);
    EXPECT_EQ(parse_central_tendency("median"), CentralTendency::Median);
    EXPECT_THROW(parse_central_tendency("mode"), InvalidInput);
}

// Property suites over seeded random lists.

TEST(PoolingProperties, MatchesLongDoubleOracle)
{
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        auto const v = random_list(rng);
        auto const w = test::random_values(v.size(), rng, 0.0, 2.0);
        EXPECT_LT(rel_err(mean_pool(v).value, static_cast<double>(oracle::mean(v))), 1e-9);
        EXPECT_LT(rel_err(sd_pool(v).value, static_cast<double>(oracle::sd(v))), 1e-12);
        EXPECT_LT(rel_err(mad_pool(v).value, static_cast<double>(oracle::mad(v))), 1e-12);
        EXPECT_LT(rel_err(weighted_mean_pool(v, w).value, static_cast<double>(oracle::weighted_mean(v, w))), 1e-9);
        for (double rho : {1.0, 1.5, 2.0, 3.0, 4.5}) {
            EXPECT_LT(rel_err(minkowski_deviation_pool(v, rho).value, static_cast<double>(oracle::minkowski(v, rho, false))),
                      1e-11);
            EXPECT_LT(rel_err(minkowski_deviation_pool(v, rho, CentralTendency::Median).value,
                              static_cast<double>(oracle::minkowski(v, rho, true))),
                      1e-11);
        }
    }
}

TEST(PoolingProperties, JointPassAgreesWithSeparatePasses)
{
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto const v = random_list(rng);
        double const alpha = unit(rng);
        auto const j = dd_pool_joint(v, alpha);
        double const sd = static_cast<double>(oracle::sd(v));
        double const mad = static_cast<double>(oracle::mad(v));
        EXPECT_LT(rel_err(j.sd.value, sd), 1e-12);
        EXPECT_LT(rel_err(j.mad.value, mad), 1e-12);
        EXPECT_LT(rel_err(j.dd.value, alpha * sd + (1 - alpha) * mad), 1e-12);
        EXPECT_LT(rel_err(dd_pool_joint(v, 0.0).dd.value, mad_pool(v).value), 1e-12);
        EXPECT_LT(rel_err(dd_pool_joint(v, 1.0).dd.value, sd_pool(v).value), 1e-12);
    }
}

TEST(PoolingProperties, MadNeverExceedsSdAndDdMonotoneInAlpha)
{
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 300; ++trial) {
        auto const v = random_list(rng);
        EXPECT_LE(mad_pool(v).value, sd_pool(v).value * (1 + 1e-15));
        double prev = -1.0;
        for (double alpha = 0.0; alpha <= 1.0; alpha += 0.125) {
            double const dd = dd_pool_joint(v, alpha).dd.value;
            EXPECT_GE(dd, prev);
            prev = dd;
        }
    }
}

TEST(PoolingProperties, ShiftAndScale)
{
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    auto deviations = [](std::vector<double> const& v) {
        return std::array<double, 4>{sd_pool(v).value, mad_pool(v).value, dd_pool_joint(v, 0.3).dd.value,
                                     minkowski_deviation_pool(v, 3.0).value};
    };
    for (int trial = 0; trial < 200; ++trial) {
        auto const v = random_list(rng);
        double const b = u(rng);
        double const k = u(rng);
        auto shifted = v;
        auto scaled = v;
        for (std::size_t i = 0; i < v.size(); ++i) {
            shifted[i] += b;
            scaled[i] *= k;
        }
        auto const base = deviations(v);
        auto const sh = deviations(shifted);
        auto const sc = deviations(scaled);
        for (std::size_t m = 0; m < base.size(); ++m) {
            EXPECT_LT(rel_err(sh[m], base[m]), 1e-12);
            EXPECT_LT(rel_err(sc[m], std::abs(k) * base[m]), 1e-12);
        }
    }
}

TEST(PoolingProperties, ConstantListsPoolToExactlyZero)
{
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<std::size_t> len(1, 5000);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> const v(len(rng), u(rng));
        EXPECT_EQ(sd_pool(v).value, 0.0);
        EXPECT_EQ(mad_pool(v).value, 0.0);
        EXPECT_EQ(dd_pool_joint(v, 0.5).dd.value, 0.0);
        EXPECT_EQ(minkowski_deviation_pool(v, 2.5).value, 0.0);
        EXPECT_EQ(mean_pool(v).value, v.front());
    }
}

TEST(Summation, PairwiseIsAccurateOnLargeInputs)
{
    // 2^22 copies of 0.1 plus one 1e8: naive summation drifts by ~1e-4 here.
    std::size_t const n = (1u << 22) + 1;
    auto term = [](std::size_t i) { return i == 0 ? 1e8 : 0.1; };
    double const exact = 1e8 + static_cast<double>(n - 1) * 0.1;
    double naive = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        naive += term(i);
    }
    double const pw = pairwise_sum(n, term);
    EXPECT_LT(std::abs(pw - exact), 1e-5);
    EXPECT_LT(std::abs(pw - exact), std::abs(naive - exact));
}

TEST(Summation, DeterministicAcrossCalls)
{
    std::mt19937_64 rng(606);
    auto const v = test::random_values(300000, rng, -1.0, 1.0);
    double const a = pairwise_sum(v.size(), [&](std::size_t i) { return v[i]; });
    double const b = pairwise_sum(v.size(), [&](std::size_t i) { return v[i]; });
    EXPECT_EQ(a, b);
}
