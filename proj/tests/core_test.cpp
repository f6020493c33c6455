#include <gtest/gtest.h>

#include <selfadj/core.hpp>

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <vector>

using namespace selfadj;

namespace {

// Brute force: fitness of the bit string obtained by flipping `flips` in a copy.
std::size_t leading_ones_after(BitVector x, const std::vector<std::size_t>& flips) {
    for (auto i : flips) x.flip(i);
    std::size_t l = 0;
    while (l < x.size() && x.test(l)) ++l;
    return l;
}

double binom_pmf(int n, int k, double p) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                    (n - k) * std::log1p(-p));
}

// chi-square critical values at p = 0.001 by degrees of freedom
constexpr std::array<double, 10> kChi2Crit001{0.0, 10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322, 26.124, 27.877};

}  // namespace

TEST(LeadingOnes, Examples) {
    EXPECT_EQ(leading_ones(BitVector::from_string("1111")), 4u);
    EXPECT_EQ(leading_ones(BitVector::from_string("0101")), 0u);
    EXPECT_EQ(leading_ones(BitVector::from_string("1101")), 2u);
}

TEST(LeadingOnes, CrossesWordBoundaries) {
    for (std::size_t n : {63u, 64u, 65u, 128u, 130u}) {
        BitVector x(n, true);
        EXPECT_EQ(leading_ones(x), n);
        for (std::size_t zero : {std::size_t{0}, n / 2, n - 1}) {
            BitVector y(n, true);
            y.set(zero, false);
            EXPECT_EQ(leading_ones(y), zero) << "n=" << n;
        }
    }
}

TEST(IncrementalLeadingOnes, Examples) {
    const auto x = BitVector::from_string("1101");
    const std::vector<std::size_t> flip3{2}, flip1{0}, flip4{3};
    EXPECT_EQ(incremental_leading_ones(x, 2, flip3), 4u);
    EXPECT_EQ(incremental_leading_ones(x, 2, flip1), 0u);
    EXPECT_EQ(incremental_leading_ones(x, 2, flip4), 2u);
    EXPECT_EQ(incremental_leading_ones(x, 2, {}), 2u);
}

TEST(IncrementalLeadingOnes, AgreesWithBruteForce) {
    Rng rng(12345);
    std::vector<std::size_t> flips;
    for (int trial = 0; trial < 100000; ++trial) {
        const std::size_t n = 1 + rng.below(64);
        auto x = BitVector::random(n, rng);
        // bias toward long prefixes so improving flips are common
        const std::size_t prefix = rng.below(n + 1);
        for (std::size_t i = 0; i < prefix; ++i) x.set(i, true);
        const std::size_t k = rng.below(std::min<std::size_t>(n, 6) + 1);
        sample_flip_positions(n, k, rng, flips);
        const std::size_t parent = leading_ones(x);
        ASSERT_EQ(incremental_leading_ones(x, parent, flips), leading_ones_after(x, flips))
            << x.to_string() << " k=" << k;
    }
}

TEST(Rng, SameSeedSameStream) {
    Rng a(99), b(99), c(100);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a();
        EXPECT_EQ(va, b());
        differs = differs || va != c();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, BelowStaysInRange) {
    Rng rng(3);
    std::array<int, 7> hist{};
    for (int i = 0; i < 70000; ++i) ++hist[rng.below(7)];
    for (int h : hist) EXPECT_NEAR(h, 10000, 500);
    EXPECT_THROW(rng.below(0), std::invalid_argument);
}

TEST(SampleBinomial, DegenerateRates) {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(sample_binomial(17, 0.0, rng), 0u);
        EXPECT_EQ(sample_binomial(17, 1.0, rng), 17u);
    }
    EXPECT_THROW(sample_binomial(4, 1.5, rng), std::invalid_argument);
    EXPECT_THROW(sample_binomial(4, -0.1, rng), std::invalid_argument);
}

TEST(SampleBinomial, MeanOfSmallCase) {
    Rng rng(2);
    double sum = 0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) sum += static_cast<double>(sample_binomial(4, 0.5, rng));
    EXPECT_NEAR(sum / draws, 2.0, 0.01);
}

TEST(SampleBinomial, LargeMeanUsesGapSampler) {
    Rng rng(4);
    const std::size_t n = 2000;
    const double p = 0.3;
    double sum = 0, sq = 0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        const auto k = static_cast<double>(sample_binomial(n, p, rng));
        sum += k;
        sq += k * k;
    }
    const double mean = sum / draws;
    const double var = sq / draws - mean * mean;
    EXPECT_NEAR(mean, n * p, 4 * std::sqrt(n * p * (1 - p) / draws));
    EXPECT_NEAR(var, n * p * (1 - p), 0.05 * n * p * (1 - p));
}

TEST(SampleBinomialPositive, OnlyPositiveValueForOneBit) {
    Rng rng(5);
    for (double rho : {1e-9, 0.3, 1.0})
        for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_binomial_positive(1, rho, rng), 1u);
}

TEST(SampleBinomialPositive, RejectsZeroRate) {
    Rng rng(6);
    EXPECT_THROW(sample_binomial_positive(4, 0.0, rng), std::invalid_argument);
}

TEST(SampleBinomialPositive, TwoBitsHalfRate) {
    Rng rng(7);
    const int draws = 1000000;
    int ones = 0;
    for (int i = 0; i < draws; ++i) {
        const auto k = sample_binomial_positive(2, 0.5, rng);
        ASSERT_GE(k, 1u);
        ones += k == 1;
    }
    EXPECT_NEAR(static_cast<double>(ones) / draws, 2.0 / 3.0, 0.003);
}

TEST(SampleBinomialPositive, TinyRateAlmostAlwaysOneFlip) {
    Rng rng(8);
    const int draws = 100000;
    int ones = 0;
    for (int i = 0; i < draws; ++i) ones += sample_binomial_positive(4, 1e-6, rng) == 1;
    EXPECT_GE(static_cast<double>(ones) / draws, 0.999);
}

TEST(SampleBinomialPositive, RejectionBranchMean) {
    Rng rng(9);
    const std::size_t n = 100;
    const double p = 0.3;
    const double expected = n * p / (1 - std::pow(1 - p, n));
    double sum = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) sum += static_cast<double>(sample_binomial_positive(n, p, rng));
    EXPECT_NEAR(sum / draws, expected, 0.03);
}

TEST(SampleBinomialPositive, ChiSquareAgainstTruncatedPmf) {
    Rng rng(10);
    const int draws = 1000000;
    for (int n = 2; n <= 6; ++n) {
        for (double p : {0.1, 0.5, 0.9}) {
            std::vector<double> observed(n + 1, 0.0);
            for (int i = 0; i < draws; ++i) observed[sample_binomial_positive(n, p, rng)] += 1.0;
            ASSERT_EQ(observed[0], 0.0);
            const double positive = 1.0 - std::pow(1.0 - p, n);
            double chi2 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double e = draws * binom_pmf(n, k, p) / positive;
                chi2 += (observed[k] - e) * (observed[k] - e) / e;
            }
            EXPECT_LT(chi2, kChi2Crit001[n - 1]) << "n=" << n << " p=" << p;
        }
    }
}

TEST(MutateK, ZeroAndFullFlips) {
    Rng rng(11);
    const auto x = BitVector::from_string("1100101");
    const auto same = mutate_k(x, 0, rng);
    EXPECT_EQ(same.bits, x);
    EXPECT_TRUE(same.flipped.empty());

    const auto all = mutate_k(x, x.size(), rng);
    EXPECT_EQ(all.bits.to_string(), "0011010");
}

TEST(MutateK, SingleFlipUniformOverPositions) {
    Rng rng(12);
    const BitVector x(3);
    std::array<int, 3> counts{};
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
        const auto y = mutate_k(x, 1, rng);
        ASSERT_EQ(y.flipped.size(), 1u);
        ++counts[y.flipped[0]];
    }
    for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / draws, 1.0 / 3.0, 0.01);
}

TEST(MutateK, SubsetsUniformIncludingComplementBranch) {
    Rng rng(13);
    const std::size_t n = 6;
    for (std::size_t k : {2u, 4u}) {
        std::map<std::vector<std::size_t>, int> counts;
        const int draws = 300000;
        std::vector<std::size_t> flips;
        for (int i = 0; i < draws; ++i) {
            sample_flip_positions(n, k, rng, flips);
            ASSERT_TRUE(std::is_sorted(flips.begin(), flips.end()));
            ASSERT_EQ(std::set<std::size_t>(flips.begin(), flips.end()).size(), k);
            ++counts[flips];
        }
        ASSERT_EQ(counts.size(), 15u);  // C(6,2) = C(6,4)
        const double e = draws / 15.0;
        double chi2 = 0;
        for (const auto& [subset, c] : counts) chi2 += (c - e) * (c - e) / e;
        EXPECT_LT(chi2, 36.12) << "k=" << k;  // df=14, p=0.001
    }
}

TEST(MutateK, LargeKUsesMarkerPath) {
    Rng rng(14);
    const BitVector x(200);
    const auto y = mutate_k(x, 60, rng);
    EXPECT_EQ(y.bits.count(), 60u);
    EXPECT_EQ(y.flipped.size(), 60u);
}

TEST(MutateK, ReapplyingFlipSetIsIdentity) {
    Rng rng(15);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng.below(150);
        const auto x = BitVector::random(n, rng);
        auto y = mutate_k(x, rng.below(n + 1), rng);
        EXPECT_NE(y.bits == x, !y.flipped.empty());
        apply_flips(y.bits, y.flipped);
        ASSERT_EQ(y.bits, x);
    }
}
