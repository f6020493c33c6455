#pragma once

/// @file numeric.hpp
/// @brief Small numerical building blocks: compensated summation, bisection
/// for monotone functions, golden-section search.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace selfadj::numeric {

/// Kahan-Babuska (Neumaier) compensated sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Bracket {
    double lo;
    double hi;
};

/// Root of a strictly decreasing `f` on [lo, hi] with f(lo) > 0 > f(hi).
/// Steps geometrically while the bracket spans more than a factor 4 (roots
/// may sit many decades below hi), arithmetically afterwards.
template <class F>
double bisect_decreasing(F&& f, Bracket b, double rel_tol = 1e-13, int max_iter = 2000) {
    double lo = b.lo;
    double hi = b.hi;
    for (int i = 0; i < max_iter && hi - lo > rel_tol * hi; ++i) {
        const double mid = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Maximizer of `f` on [lo, hi] by golden-section search.
template <class F>
double golden_section_max(F&& f, double lo, double hi, double abs_tol = 1e-15, int max_iter = 400) {
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < max_iter && b - a > abs_tol; ++i) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? c : d;
}

}  // namespace selfadj::numeric
