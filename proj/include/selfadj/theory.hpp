#pragma once

/// @file theory.hpp
/// @brief Expected (fixed-target) running times of (1+1) variants on
/// LeadingOnes, evaluated as level sums.
///
/// On LeadingOnes every level below the optimum is visited with probability
/// exactly 1/2 (the bits behind the first zero stay uniformly random), so the
/// expected time to reach fitness v is half the sum of the expected exit
/// times of levels 0..v-1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "algorithms.hpp"
#include "numeric.hpp"
#include "probability.hpp"

namespace selfadj {

/// Per-level rate (or flip count, for FixedK) of a fitness-dependent scheme.
struct LevelSchedule {
    std::size_t n = 0;
    MutationModel model = MutationModel::Unconditional;
    std::vector<double> rates;        ///< Unconditional / Truncated, one per level
    std::vector<std::size_t> flips;   ///< FixedK, one per level
    /// Truncated only: cap level times at n (the rate-0 / one-bit value).
    bool cap_at_n = true;

    void validate() const {
        if (n == 0) throw std::invalid_argument("schedule dimension must be positive");
        if (model == MutationModel::FixedK) {
            if (flips.size() != n) throw std::invalid_argument("FixedK schedule needs one flip count per level");
            for (auto k : flips)
                if (k < 1 || k > n) throw std::invalid_argument("flip counts must lie in [1, n]");
        } else {
            if (rates.size() != n) throw std::invalid_argument("schedule needs one rate per level");
            for (auto r : rates)
                if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("rates must lie in [0, 1]");
        }
    }
};

struct CurvePoint {
    double x;
    double value;
};

/// Sequence of (abscissa, expected time) pairs, abscissa strictly increasing.
struct TheoryCurve {
    std::string abscissa;  ///< "s", "v" or "ell"
    std::size_t n = 0;
    std::vector<CurvePoint> points;
};

/// Expected time to leave level ell.
inline double level_time(const LevelSchedule& schedule, std::size_t ell) {
    const std::size_t n = schedule.n;
    if (ell >= n) throw std::invalid_argument("level_time: level must be below n");
    double p = 0.0;
    switch (schedule.model) {
    case MutationModel::Unconditional:
        p = p_imp(schedule.rates[ell], ell);
        break;
    case MutationModel::Truncated:
        p = hat_p_imp(schedule.rates[ell], ell, n);
        break;
    case MutationModel::FixedK:
        p = rls_k_imp(schedule.flips[ell], ell, n);
        break;
    }
    if (!(p > 0.0))
        throw std::domain_error("invalid schedule: zero improvement probability on level " + std::to_string(ell));
    const double t = 1.0 / p;
    if (schedule.model == MutationModel::Truncated && schedule.cap_at_n) return std::min(static_cast<double>(n), t);
    return t;
}

/// Additive constant of the runtime expressions: 1 for Truncated and FixedK
/// schemes, none for the unconditional sum.
inline double runtime_constant(const LevelSchedule& schedule) {
    return schedule.model == MutationModel::Unconditional ? 0.0 : 1.0;
}

/// Expected time until fitness >= v is first evaluated.
inline double fixed_target_expected(const LevelSchedule& schedule, std::size_t v) {
    if (v > schedule.n) throw std::invalid_argument("fixed_target_expected: target exceeds n");
    numeric::CompensatedSum sum;
    for (std::size_t ell = 0; ell < v; ++ell) sum += level_time(schedule, ell);
    return runtime_constant(schedule) + 0.5 * sum.value();
}

inline double expected_runtime(const LevelSchedule& schedule) {
    schedule.validate();
    return fixed_target_expected(schedule, schedule.n);
}

/// fixed_target_expected for every v in [0..n], sharing one pass.
inline TheoryCurve fixed_target_curve(const LevelSchedule& schedule) {
    schedule.validate();
    TheoryCurve curve{"v", schedule.n, {}};
    curve.points.reserve(schedule.n + 1);
    const double c = runtime_constant(schedule);
    numeric::CompensatedSum sum;
    curve.points.push_back({0.0, c + 0.5 * sum.value()});
    for (std::size_t ell = 0; ell < schedule.n; ++ell) {
        sum += level_time(schedule, ell);
        curve.points.push_back({static_cast<double>(ell + 1), c + 0.5 * sum.value()});
    }
    return curve;
}

/// Asymptotic normalized runtime (s+1)/(4 ln(s+1)) of the self-adjusting EA.
inline double normalized_selfadj_ea(SuccessRatio s) {
    return (s.value() + 1.0) / (4.0 * std::log1p(s.value()));
}

inline LevelSchedule selfadj_ea_schedule(std::size_t n, SuccessRatio s) {
    LevelSchedule sch{n, MutationModel::Unconditional, std::vector<double>(n), {}, true};
    for (std::size_t ell = 0; ell < n; ++ell) sch.rates[ell] = rho_star(ell, s);
    return sch;
}

/// Resampling EA run at its target rates on levels ell <= ell0 =
/// floor((1-eta0) s n/(s+1)) and at rate 0 (one-bit flips, time n) above.
/// Level times are not capped at n: just below s n/(s+1) the target rate is
/// tiny but positive and its exit time slightly exceeds n.
inline LevelSchedule selfadj_ea_gt0_schedule(std::size_t n, SuccessRatio s, double eta0 = 0.0) {
    if (!(eta0 >= 0.0 && eta0 < 1.0)) throw std::invalid_argument("eta0 must lie in [0, 1)");
    const double sv = s.value();
    const auto ell0 = static_cast<std::size_t>(std::floor((1.0 - eta0) * sv * static_cast<double>(n) / (sv + 1.0)));
    LevelSchedule sch{n, MutationModel::Truncated, std::vector<double>(n, 0.0), {}, false};
    if (n > 0) sch.rates[0] = 1.0;
    for (std::size_t ell = 1; ell < n && ell <= ell0; ++ell) sch.rates[ell] = hat_rho_star(ell, s, n).value_or(0.0);
    return sch;
}

inline LevelSchedule static_schedule(std::size_t n, double rate) {
    return {n, MutationModel::Unconditional, std::vector<double>(n, rate), {}, true};
}

/// Unconditional EA with rate 1/(ell+1).
inline LevelSchedule ea_opt_schedule(std::size_t n) {
    LevelSchedule sch{n, MutationModel::Unconditional, std::vector<double>(n), {}, true};
    for (std::size_t ell = 0; ell < n; ++ell) sch.rates[ell] = 1.0 / static_cast<double>(ell + 1);
    return sch;
}

inline LevelSchedule ea_gt0_opt_schedule(std::size_t n) {
    LevelSchedule sch{n, MutationModel::Truncated, std::vector<double>(n), {}, true};
    for (std::size_t ell = 0; ell < n; ++ell) sch.rates[ell] = p_gt0_opt(ell, n);
    return sch;
}

inline LevelSchedule rls_schedule(std::size_t n) {
    return {n, MutationModel::FixedK, {}, std::vector<std::size_t>(n, 1), true};
}

inline LevelSchedule rls_opt_schedule(std::size_t n) {
    return {n, MutationModel::FixedK, {}, k_opt_table(n), true};
}

enum class SweepVariant { EA, EAGt0 };

struct SweepResult {
    TheoryCurve curve;
    double argmin = 0.0;
    double min_value = 0.0;
};

/// Expected runtime of the self-adjusting variant for each s in the grid.
inline SweepResult sweep_success_ratio(std::size_t n, const std::vector<double>& s_grid, SweepVariant variant,
                                       double eta0 = 0.0) {
    if (s_grid.empty()) throw std::invalid_argument("success-ratio grid is empty");
    for (std::size_t i = 1; i < s_grid.size(); ++i)
        if (!(s_grid[i] > s_grid[i - 1])) throw std::invalid_argument("success-ratio grid must be strictly increasing");

    SweepResult result{{"s", n, {}}, 0.0, 0.0};
    for (double s : s_grid) {
        const SuccessRatio ratio(s);
        const double t = variant == SweepVariant::EA ? expected_runtime(selfadj_ea_schedule(n, ratio))
                                                     : expected_runtime(selfadj_ea_gt0_schedule(n, ratio, eta0));
        result.curve.points.push_back({s, t});
        if (result.curve.points.size() == 1 || t < result.min_value) {
            result.min_value = t;
            result.argmin = s;
        }
    }
    return result;
}

/// Largest v such that a(v') <= b(v') for every v' <= v, or nullopt if a
/// already exceeds b at the first abscissa.
inline std::optional<std::size_t> crossing_point(const TheoryCurve& a, const TheoryCurve& b) {
    if (a.points.size() != b.points.size()) throw std::invalid_argument("crossing_point: curves have different ranges");
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (a.points[i].x != b.points[i].x) throw std::invalid_argument("crossing_point: curves have different abscissae");

    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (a.points[i].value > b.points[i].value) break;
        last = static_cast<std::size_t>(a.points[i].x);
    }
    return last;
}

/// Smallest level on which the optimal resampling rate is 0 (n if none).
inline std::size_t gt0_zero_rate_threshold(std::size_t n) {
    for (std::size_t ell = 0; ell < n; ++ell)
        if (p_gt0_opt(ell, n) == 0.0) return ell;
    return n;
}

/// Smallest level on which the self-adjusting resampling EA has no target
/// rate, ceil(s n/(s+1)).
inline std::size_t selfadj_gt0_zero_rate_threshold(std::size_t n, SuccessRatio s) {
    return hat_rho_star_threshold(s, n);
}

}  // namespace selfadj
