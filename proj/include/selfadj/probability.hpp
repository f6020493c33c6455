#pragma once

/// @file probability.hpp
/// @brief Success and improvement probabilities on LeadingOnes, target
/// mutation rates, and optimal fitness-dependent rates / flip counts.
///
/// "Success" means the offspring is at least as good as its parent,
/// "improvement" means strictly better. The hat_ variants are the same
/// quantities under the resampling mutation (flip count drawn from Bin(n, rho)
/// conditioned on being positive).

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "numeric.hpp"

namespace selfadj {

/// Success ratio s > 0: a success multiplies the rate by F^s, a failure
/// divides it by F, so the rate is in equilibrium at success frequency 1/(s+1).
class SuccessRatio {
public:
    explicit SuccessRatio(double s) : s_(s) {
        if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("success ratio must be positive");
    }
    static SuccessRatio e_minus_one() { return SuccessRatio(std::numbers::e - 1.0); }

    double value() const noexcept { return s_; }
    /// 1/(s+1), the target success probability.
    double target_success() const noexcept { return 1.0 / (s_ + 1.0); }

private:
    double s_;
};

namespace detail {

inline void check_level(std::size_t ell, std::size_t n) {
    if (n == 0) throw std::invalid_argument("dimension n must be positive");
    if (ell >= n) throw std::invalid_argument("fitness level must be below n");
}

// (1-rho)^m and 1-(1-rho)^m without cancellation.
inline double stay_prob(double rho, double m) {
    if (m == 0.0) return 1.0;
    if (rho >= 1.0) return 0.0;
    return std::exp(m * std::log1p(-rho));
}
inline double move_prob(double rho, double m) {
    if (m == 0.0) return 0.0;
    if (rho >= 1.0) return 1.0;
    return -std::expm1(m * std::log1p(-rho));
}

}  // namespace detail

/// (1-rho)^ell
inline double p_suc(double rho, std::size_t ell) { return detail::stay_prob(rho, static_cast<double>(ell)); }

/// (1-rho)^ell * rho
inline double p_imp(double rho, std::size_t ell) { return p_suc(rho, ell) * rho; }

/// The unique rate with (1-rho)^ell = 1/(s+1); 1 on level 0.
inline double rho_star(std::size_t ell, SuccessRatio s) {
    if (ell == 0) return 1.0;
    return -std::expm1(-std::log1p(s.value()) / static_cast<double>(ell));
}

/// Success probability under resampling mutation, 1 - (1-(1-rho)^ell)/(1-(1-rho)^n).
/// Undefined at rho = 0; see hat_p_suc_limit0.
inline double hat_p_suc(double rho, std::size_t ell, std::size_t n) {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("hat_p_suc: rho must lie in (0, 1]");
    if (n == 0 || ell > n) throw std::invalid_argument("hat_p_suc: need 0 <= ell <= n, n >= 1");
    // ((1-rho)^ell - (1-rho)^n) / (1-(1-rho)^n), factored to keep relative accuracy
    const auto l = static_cast<double>(ell);
    const auto nd = static_cast<double>(n);
    return detail::stay_prob(rho, l) * detail::move_prob(rho, nd - l) / detail::move_prob(rho, nd);
}

/// Limit of hat_p_suc as rho -> 0.
inline double hat_p_suc_limit0(std::size_t ell, std::size_t n) {
    if (n == 0 || ell > n) throw std::invalid_argument("hat_p_suc_limit0: need 0 <= ell <= n, n >= 1");
    return 1.0 - static_cast<double>(ell) / static_cast<double>(n);
}

/// Improvement probability under resampling mutation,
/// (1-rho)^ell rho / (1-(1-rho)^n). Returns the continuous limit 1/n at rho = 0.
inline double hat_p_imp(double rho, std::size_t ell, std::size_t n) {
    detail::check_level(ell, n);
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("hat_p_imp: rho must lie in [0, 1]");
    if (rho == 0.0) return 1.0 / static_cast<double>(n);
    return detail::stay_prob(rho, static_cast<double>(ell)) * rho / detail::move_prob(rho, static_cast<double>(n));
}

/// True iff a resampling target rate exists on level ell, i.e. ell < s n/(s+1).
inline bool hat_rho_star_exists(std::size_t ell, SuccessRatio s, std::size_t n) {
    const double sv = s.value();
    return static_cast<double>(ell) * (sv + 1.0) < sv * static_cast<double>(n);
}

/// Smallest level without a resampling target rate, ceil(s n/(s+1)).
inline std::size_t hat_rho_star_threshold(SuccessRatio s, std::size_t n) {
    const double sv = s.value();
    auto ell = static_cast<std::size_t>(std::floor(sv * static_cast<double>(n) / (sv + 1.0)));
    while (ell > 0 && !hat_rho_star_exists(ell - 1, s, n)) --ell;
    while (hat_rho_star_exists(ell, s, n)) ++ell;
    return ell;
}

/// Analytic bracket for the resampling target rate. Only valid for large n;
/// callers must verify it.
inline numeric::Bracket hat_rho_star_bracket(std::size_t ell, SuccessRatio s, std::size_t n) {
    const double sv = s.value();
    const double nd = static_cast<double>(n);
    const double ld = static_cast<double>(ell);
    const double ln_s1 = std::log1p(sv);
    const double eta = 1.0 - ld * (sv + 1.0) / (sv * nd);
    const double near_edge = 1.0 / (8.0 * (sv + 1.0) * (sv + 1.0));
    double lo;
    double hi;
    if (eta <= near_edge) {
        lo = eta / nd;
        hi = 4.0 * eta * (sv + 1.0) / nd;
    } else {
        const double kappa = 0.25 * ln_s1 / std::log1p(std::sqrt(sv + 1.0));
        lo = std::min(kappa / (8.0 * (sv + 1.0) * (sv + 1.0)), 0.25 * ln_s1) / ld;
        hi = std::max(sv * ln_s1 / ((sv + 1.0) * kappa), ln_s1) / ld;
    }
    return {lo / 4.0, std::min(1.0 - 1e-15, 4.0 * hi)};
}

/// Root of hat_p_suc(rho, ell, n) = 1/(s+1) for 1 <= ell < n, or nullopt when
/// ell >= s n/(s+1) and no such rate exists.
inline std::optional<double> hat_rho_star(std::size_t ell, SuccessRatio s, std::size_t n) {
    detail::check_level(ell, n);
    if (ell == 0) throw std::invalid_argument("hat_rho_star: requires ell >= 1");
    if (!hat_rho_star_exists(ell, s, n)) return std::nullopt;

    const double target = s.target_success();
    auto excess = [&](double rho) { return hat_p_suc(rho, ell, n) - target; };

    auto bracket = hat_rho_star_bracket(ell, s, n);
    if (!(bracket.lo > 0.0 && excess(bracket.lo) > 0.0 && excess(bracket.hi) < 0.0))
        bracket = {1e-300, 1.0 - 1e-15};
    return numeric::bisect_decreasing(excess, bracket, 1e-14, 200);
}

/// Rate in [0, 1) maximizing hat_p_imp(., ell, n); 0 when the supremum is the
/// rho -> 0 limit 1/n. A logarithmic grid locates the best cell, which is then
/// refined by golden-section search, so no unimodality is assumed.
inline double p_gt0_opt(std::size_t ell, std::size_t n) {
    detail::check_level(ell, n);
    constexpr int grid_points = 2048;
    constexpr double log_lo = -9.0;
    auto grid = [](int i) { return std::pow(10.0, log_lo * (1.0 - static_cast<double>(i) / grid_points)); };
    auto f = [&](double rho) { return hat_p_imp(rho, ell, n); };

    int best = 0;
    double best_value = f(grid(0));
    for (int i = 1; i < grid_points; ++i) {
        const double v = f(grid(i));
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    const double lo = best == 0 ? 0.0 : grid(best - 1);
    const double hi = best + 1 < grid_points ? grid(best + 1) : std::nextafter(1.0, 0.0);
    const double rho = numeric::golden_section_max(f, lo, hi, 1e-16 + 1e-13 * hi);
    const double value = rho > 0.0 ? f(rho) : 0.0;

    const double limit = 1.0 / static_cast<double>(n);
    if (std::max(value, best_value) <= limit) return 0.0;
    return value >= best_value ? rho : grid(best);
}

/// Probability that flipping a uniform k-subset improves a level-ell point:
/// C(n-ell-1, k-1) / C(n, k).
inline double rls_k_imp(std::size_t k, std::size_t ell, std::size_t n) {
    detail::check_level(ell, n);
    if (k < 1 || k > n) throw std::invalid_argument("rls_k_imp: need 1 <= k <= n");
    if (k - 1 > n - ell - 1) return 0.0;
    // k/n * prod_{i=1}^{k-1} (n-ell-i)/(n-i)
    double q = static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t i = 1; i < k; ++i) q *= static_cast<double>(n - ell - i) / static_cast<double>(n - i);
    return q;
}

/// Flip count maximizing rls_k_imp(., ell, n), smallest on ties.
///
/// q(k+1)/q(k) = (n-ell-k)(k+1) / (k(n-k)), which exceeds 1 iff
/// k(ell+1) < n-ell, so q rises then falls and the first k where the ratio
/// drops to <= 1 is the argmax. The comparison is done in exact integers.
inline std::size_t rls_k_opt(std::size_t ell, std::size_t n) {
    detail::check_level(ell, n);
    const std::size_t max_k = n - ell;
    std::size_t k = 1;
    while (k < max_k && k * (ell + 1) < n - ell) ++k;
    return k;
}

}  // namespace selfadj
