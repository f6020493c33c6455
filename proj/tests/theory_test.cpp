#include <gtest/gtest.h>

#include <selfadj/theory.hpp>

#include <cmath>
#include <numbers>

using namespace selfadj;

namespace {

// Direct long-double level sum for a static unconditional rate.
long double static_sum_oracle(long double rho, std::size_t v) {
    long double sum = 0;
    for (std::size_t ell = 0; ell < v; ++ell) sum += 1.0L / (std::pow(1.0L - rho, static_cast<long double>(ell)) * rho);
    return sum / 2;
}

// Self-adjusting EA: p_imp at the target rate is rho*/(s+1); rho* in closed form.
long double selfadj_sum_oracle(std::size_t n, double s) {
    long double sum = 1.0L;  // level 0, rate 1
    for (std::size_t ell = 1; ell < n; ++ell) {
        const long double r = 1.0L - std::pow(static_cast<long double>(s) + 1.0L, -1.0L / ell);
        sum += (s + 1.0L) / r;
    }
    return sum / 2;
}

TheoryCurve curve(std::vector<double> values) {
    TheoryCurve c{"v", values.size() - 1, {}};
    for (std::size_t i = 0; i < values.size(); ++i) c.points.push_back({static_cast<double>(i), values[i]});
    return c;
}

}  // namespace

TEST(LevelTime, MatchesSimulatedGeometricExit) {
    const std::size_t n = 50, ell = 20;
    const double rho = 1.0 / n;
    const double theory = level_time(static_schedule(n, rho), ell);
    Rng seeds(1);
    const int reps = 20000;
    double total = 0;
    for (int r = 0; r < reps; ++r) {
        BitVector start(n);
        for (std::size_t i = 0; i < ell; ++i) start.set(i, true);
        OnePlusOne algo(AlgorithmSpec::static_ea(n, rho), seeds(), start);
        while (algo.state().fitness == ell) algo.step();
        total += static_cast<double>(algo.state().iteration);
    }
    EXPECT_NEAR(total / reps, theory, 0.03 * theory);
}

TEST(LevelTime, ZeroImprovementProbabilityIsDomainError) {
    auto sch = static_schedule(10, 0.0);
    EXPECT_THROW(level_time(sch, 3), std::domain_error);
    EXPECT_THROW(level_time(sch, 10), std::invalid_argument);
}

TEST(LevelTime, TruncatedCapAtN) {
    LevelSchedule sch{20, MutationModel::Truncated, std::vector<double>(20, 0.0), {}, true};
    EXPECT_DOUBLE_EQ(level_time(sch, 5), 20.0);
    sch.rates[15] = 0.9;
    EXPECT_DOUBLE_EQ(level_time(sch, 15), 20.0);
    sch.cap_at_n = false;
    EXPECT_GT(level_time(sch, 15), 1e6);
}

TEST(ExpectedRuntime, RlsClosedForm) {
    EXPECT_DOUBLE_EQ(expected_runtime(rls_schedule(100)), 5001.0);
    for (std::size_t v : {0u, 1u, 37u, 100u}) EXPECT_DOUBLE_EQ(fixed_target_expected(rls_schedule(100), v), 1.0 + v * 50.0);
}

TEST(ExpectedRuntime, StaticMatchesLongDoubleOracle) {
    for (double mult : {1.0, 1.5936}) {
        const std::size_t n = 10000;
        const double rho = mult / n;
        const double t = expected_runtime(static_schedule(n, rho));
        EXPECT_NEAR(t, static_cast<double>(static_sum_oracle(rho, n)), 1e-10 * t);
    }
}

TEST(ExpectedRuntime, SelfAdjustingMatchesOracleAndClosedForm) {
    const std::size_t n = 10000;
    for (double s : {0.5, 1.0, std::numbers::e - 1, 4.0}) {
        const double t = expected_runtime(selfadj_ea_schedule(n, SuccessRatio(s)));
        EXPECT_NEAR(t, static_cast<double>(selfadj_sum_oracle(n, s)), 1e-9 * t);
        const double closed = normalized_selfadj_ea(SuccessRatio(s));
        EXPECT_NEAR(t / (double(n) * n), closed, 0.01 * closed);
    }
}

TEST(ExpectedRuntime, ClosedFormValues) {
    EXPECT_NEAR(normalized_selfadj_ea(SuccessRatio::e_minus_one()), std::numbers::e / 4, 1e-12);
    EXPECT_NEAR(normalized_selfadj_ea(SuccessRatio(4)), 5.0 / (4.0 * std::log(5.0)), 1e-15);
}

TEST(ExpectedRuntime, EaOptFixedTargetOracle) {
    const std::size_t n = 10000, v = 5000;
    long double sum = 0;
    for (std::size_t ell = 0; ell < v; ++ell) {
        const long double r = 1.0L / (ell + 1);
        sum += 1.0L / (std::pow(1.0L - r, static_cast<long double>(ell)) * r);
    }
    const double t = fixed_target_expected(ea_opt_schedule(n), v);
    EXPECT_NEAR(t, static_cast<double>(sum / 2), 1e-9 * t);
    EXPECT_LT(t, 17e6);
}

TEST(ExpectedRuntime, RlsOptBeatsRls) {
    const std::size_t n = 1000;
    const double opt = expected_runtime(rls_opt_schedule(n));
    EXPECT_LT(opt, expected_runtime(rls_schedule(n)));
    EXPECT_NEAR(opt / (double(n) * n), 0.3884, 0.002);
}

TEST(ExpectedRuntime, SelfAdjustingResamplingSchedule) {
    const std::size_t n = 1000;
    const SuccessRatio s(1.0);
    const auto sch = selfadj_ea_gt0_schedule(n, s);
    EXPECT_FALSE(sch.cap_at_n);
    EXPECT_EQ(sch.rates[0], 1.0);
    for (std::size_t ell = hat_rho_star_threshold(s, n); ell < n; ++ell) ASSERT_EQ(sch.rates[ell], 0.0);
    // above n/2 and below the threshold the tiny positive target rate is slower than one-bit flips
    const SuccessRatio s2(1.285);
    const auto sch2 = selfadj_ea_gt0_schedule(n, s2);
    EXPECT_GT(level_time(sch2, hat_rho_star_threshold(s2, n) - 1), static_cast<double>(n));
    EXPECT_LT(level_time(sch2, 400), static_cast<double>(n));
    const auto shifted = selfadj_ea_gt0_schedule(n, s, 0.25);
    EXPECT_GT(shifted.rates[375], 0.0);
    EXPECT_EQ(shifted.rates[376], 0.0);
    EXPECT_THROW(selfadj_ea_gt0_schedule(n, s, 1.0), std::invalid_argument);
}

TEST(FixedTargetCurve, AgreesWithPointEvaluation) {
    const auto sch = selfadj_ea_schedule(300, SuccessRatio(4));
    const auto c = fixed_target_curve(sch);
    ASSERT_EQ(c.points.size(), 301u);
    EXPECT_EQ(c.points.front().value, 0.0);
    for (std::size_t v : {0u, 1u, 150u, 300u}) EXPECT_NEAR(c.points[v].value, fixed_target_expected(sch, v), 1e-9);
    for (std::size_t v = 1; v <= 300; ++v) EXPECT_GT(c.points[v].value, c.points[v - 1].value);
}

TEST(FixedTargetCurve, ValidatesSchedule) {
    LevelSchedule bad{10, MutationModel::Unconditional, std::vector<double>(9, 0.1), {}, true};
    EXPECT_THROW(fixed_target_curve(bad), std::invalid_argument);
    EXPECT_THROW(fixed_target_expected(rls_schedule(10), 11), std::invalid_argument);
}

TEST(Sweep, ArgminNearEMinusOne) {
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(1.5 + 0.01 * i);
    const auto r = sweep_success_ratio(10000, grid, SweepVariant::EA);
    EXPECT_EQ(r.curve.points.size(), grid.size());
    EXPECT_NEAR(r.argmin, std::numbers::e - 1, 0.01);
    for (const auto& p : r.curve.points) EXPECT_GE(p.value, r.min_value);
}

TEST(Sweep, RejectsBadGrid) {
    EXPECT_THROW(sweep_success_ratio(100, {}, SweepVariant::EA), std::invalid_argument);
    EXPECT_THROW(sweep_success_ratio(100, {1.0, 1.0}, SweepVariant::EA), std::invalid_argument);
    EXPECT_THROW(sweep_success_ratio(100, {-1.0}, SweepVariant::EA), std::invalid_argument);
}

TEST(CrossingPoint, PrefixDominance) {
    EXPECT_EQ(crossing_point(curve({0, 1, 2, 5}), curve({0, 2, 3, 4})), 2u);
    EXPECT_EQ(crossing_point(curve({0, 1, 2}), curve({0, 2, 3})), 2u);
    EXPECT_FALSE(crossing_point(curve({1, 1}), curve({0, 2})).has_value());
    // a later return below b does not extend the prefix
    EXPECT_EQ(crossing_point(curve({0, 3, 1}), curve({0, 2, 2})), 0u);
    EXPECT_THROW(crossing_point(curve({0, 1}), curve({0, 1, 2})), std::invalid_argument);
}

TEST(CrossingPoint, SelfAdjustingVsRlsAtModerateN) {
    const std::size_t n = 1000;
    const auto ea = fixed_target_curve(selfadj_ea_schedule(n, SuccessRatio(4)));
    const auto rls = fixed_target_curve(rls_schedule(n));
    const auto v = crossing_point(ea, rls);
    ASSERT_TRUE(v.has_value());
    EXPECT_GT(*v, n / 2);
    EXPECT_LT(*v, n);
}

TEST(Thresholds, ZeroRateLevels) {
    for (std::size_t n : {100u, 1000u}) EXPECT_EQ(gt0_zero_rate_threshold(n), n / 2);  // ceil((n-1)/2) for even n
    EXPECT_EQ(selfadj_gt0_zero_rate_threshold(1000, SuccessRatio(1)), 500u);
    EXPECT_EQ(selfadj_gt0_zero_rate_threshold(1000, SuccessRatio(4)), 800u);
}

TEST(ExpectedRuntime, QuadraticScaling) {
    auto all = [](std::size_t n) {
        return std::vector<LevelSchedule>{selfadj_ea_schedule(n, SuccessRatio(4)),
                                          selfadj_ea_gt0_schedule(n, SuccessRatio(1.285)),
                                          static_schedule(n, 1.0 / n),
                                          ea_opt_schedule(n),
                                          ea_gt0_opt_schedule(n),
                                          rls_schedule(n),
                                          rls_opt_schedule(n)};
    };
    const auto small = all(500), large = all(1000);
    for (std::size_t i = 0; i < small.size(); ++i) {
        const double ratio = expected_runtime(large[i]) / expected_runtime(small[i]);
        EXPECT_GE(ratio, 3.8) << "schedule " << i;
        EXPECT_LE(ratio, 4.2) << "schedule " << i;
    }
}

TEST(ExpectedRuntime, TotalEqualsFixedTargetAtN) {
    for (const auto& sch : {selfadj_ea_schedule(777, SuccessRatio(2)), ea_gt0_opt_schedule(777), rls_opt_schedule(777)}) {
        EXPECT_EQ(expected_runtime(sch), fixed_target_expected(sch, 777));
        EXPECT_EQ(expected_runtime(sch), fixed_target_curve(sch).points.back().value);
    }
}
