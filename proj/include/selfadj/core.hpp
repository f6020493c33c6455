#pragma once

/// @file core.hpp
/// @brief Bit strings, LeadingOnes evaluation, flip-count sampling and the
/// k-bit mutation operator.
///
/// Positions are 0-based in code. Position i here is bit x_{i+1} in the usual
/// 1-based notation for LeadingOnes, so a point with fitness l has bits
/// [0, l) set and bit l cleared.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace selfadj {

/// Deterministic 64-bit generator. Only the raw engine output is used; all
/// derived draws are computed here so streams are bit-identical across
/// standard library implementations.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1).
    double uniform_open() {
        for (;;) {
            const double u = uniform01();
            if (u > 0.0) return u;
        }
    }

    /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::mt19937_64 engine_;
};

/// Fixed-length bit string packed into 64-bit words.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n, bool value = false)
        : size_(n), words_((n + 63) / 64, value ? ~std::uint64_t{0} : 0) {
        clear_padding();
    }

    static BitVector random(std::size_t n, Rng& rng) {
        BitVector x(n);
        for (auto& w : x.words_) w = rng();
        x.clear_padding();
        return x;
    }

    /// Parses a string of '0'/'1' characters, first character is position 0.
    static BitVector from_string(std::string_view bits) {
        BitVector x(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1')
                x.set(i, true);
            else if (bits[i] != '0')
                throw std::invalid_argument("BitVector::from_string: expected only '0' and '1'");
        }
        return x;
    }

    std::string to_string() const {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; ++i)
            if (test(i)) s[i] = '1';
        return s;
    }

    std::size_t size() const noexcept { return size_; }

    bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
    void set(std::size_t i, bool value) noexcept {
        const auto mask = std::uint64_t{1} << (i & 63);
        if (value)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    std::span<const std::uint64_t> words() const noexcept { return words_; }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    void clear_padding() noexcept {
        if (size_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Length of the maximal all-ones prefix.
inline std::size_t leading_ones(const BitVector& x) noexcept {
    const auto words = x.words();
    std::size_t result = 0;
    for (auto w : words) {
        const auto ones = static_cast<std::size_t>(std::countr_one(w));
        result += ones;
        if (ones < 64) break;
    }
    return std::min(result, x.size());
}

/// Fitness of the offspring obtained by flipping `flipped` in `parent`, given
/// the parent's fitness. `flipped` must be sorted ascending and distinct.
/// The parent is not modified. Cost is O(|flipped| + fitness gain).
inline std::size_t incremental_leading_ones(const BitVector& parent, std::size_t parent_fitness,
                                            std::span<const std::size_t> flipped) noexcept {
    if (flipped.empty()) return parent_fitness;
    const std::size_t first = flipped.front();
    if (first != parent_fitness) return std::min(first, parent_fitness);

    // bit `parent_fitness` turned from 0 to 1; walk the tail, xor-ing in later flips
    const std::size_t n = parent.size();
    std::size_t next_flip = 1;
    std::size_t j = parent_fitness + 1;
    for (; j < n; ++j) {
        bool bit = parent.test(j);
        if (next_flip < flipped.size() && flipped[next_flip] == j) {
            bit = !bit;
            ++next_flip;
        }
        if (!bit) break;
    }
    return j;
}

namespace detail {

// (1-p)^m without cancellation for small p.
inline double pow1m(double p, double m) {
    if (m == 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    return std::exp(m * std::log1p(-p));
}

// Inverse-CDF walk starting from `k0` with pmf value `pk` at k0, target mass `u`.
inline std::size_t binomial_walk(std::size_t n, double rho, std::size_t k0, double pk, double u) {
    const double odds = rho / (1.0 - rho);
    std::size_t k = k0;
    double cdf = pk;
    while (cdf < u && k < n) {
        pk *= static_cast<double>(n - k) / static_cast<double>(k + 1) * odds;
        ++k;
        cdf += pk;
        if (pk == 0.0 && cdf < u) break;
    }
    return k;
}

// Bin(n, rho) for rho <= 1/2 by summing geometric gaps between successes.
inline std::size_t binomial_by_gaps(std::size_t n, double rho, Rng& rng) {
    const double log_q = std::log1p(-rho);
    std::size_t k = 0;
    double pos = 0.0;
    const auto limit = static_cast<double>(n);
    for (;;) {
        pos += std::floor(std::log(rng.uniform_open()) / log_q) + 1.0;
        if (pos > limit) return k;
        ++k;
    }
}

inline void check_rate(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("mutation rate must lie in [0, 1]");
}

}  // namespace detail

/// Draws k ~ Bin(n, rho).
inline std::size_t sample_binomial(std::size_t n, double rho, Rng& rng) {
    detail::check_rate(rho);
    if (n == 0 || rho == 0.0) return 0;
    if (rho == 1.0) return n;
    if (rho > 0.5) return n - sample_binomial(n, 1.0 - rho, rng);
    const double mean = static_cast<double>(n) * rho;
    if (mean < 200.0) {
        const double p0 = detail::pow1m(rho, static_cast<double>(n));
        return detail::binomial_walk(n, rho, 0, p0, rng.uniform01());
    }
    return detail::binomial_by_gaps(n, rho, rng);
}

/// Draws k from Bin(n, rho) conditioned on k >= 1. Rejects rho == 0, where
/// the conditional distribution is undefined.
inline std::size_t sample_binomial_positive(std::size_t n, double rho, Rng& rng) {
    detail::check_rate(rho);
    if (rho == 0.0) throw std::invalid_argument("sample_binomial_positive: rho must be positive");
    if (n == 0) throw std::invalid_argument("sample_binomial_positive: n must be positive");
    if (n == 1 || rho == 1.0) return rho == 1.0 ? n : 1;

    const auto nd = static_cast<double>(n);
    if (nd * rho <= 10.0) {
        // inverse CDF of the truncated law; total positive mass 1-(1-rho)^n
        const double log_q = std::log1p(-rho);
        const double positive_mass = -std::expm1(nd * log_q);
        const double p1 = nd * rho * std::exp((nd - 1.0) * log_q);
        const double u = rng.uniform01() * positive_mass;
        return detail::binomial_walk(n, rho, 1, p1, u);
    }
    for (;;) {
        const std::size_t k = sample_binomial(n, rho, rng);
        if (k > 0) return k;
    }
}

/// Writes a uniformly random k-subset of [0, n) to `out`, sorted ascending.
/// Floyd's algorithm; the complement is drawn when k > n/2.
inline void sample_flip_positions(std::size_t n, std::size_t k, Rng& rng, std::vector<std::size_t>& out) {
    if (k > n) throw std::invalid_argument("sample_flip_positions: k exceeds n");
    out.clear();
    if (k == 0) return;
    if (k == n) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = i;
        return;
    }

    const bool complement = 2 * k > n;
    const std::size_t m = complement ? n - k : k;
    auto& chosen = out;
    chosen.reserve(m);
    if (m <= 32) {
        for (std::size_t j = n - m; j < n; ++j) {
            const auto t = static_cast<std::size_t>(rng.below(j + 1));
            const bool seen = std::find(chosen.begin(), chosen.end(), t) != chosen.end();
            chosen.push_back(seen ? j : t);
        }
    } else {
        std::vector<bool> marked(n, false);
        for (std::size_t j = n - m; j < n; ++j) {
            auto t = static_cast<std::size_t>(rng.below(j + 1));
            if (marked[t]) t = j;
            marked[t] = true;
            chosen.push_back(t);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    if (!complement) return;

    std::vector<std::size_t> kept;
    kept.reserve(k);
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (c < chosen.size() && chosen[c] == i)
            ++c;
        else
            kept.push_back(i);
    }
    out = std::move(kept);
}

inline void apply_flips(BitVector& x, std::span<const std::size_t> flipped) noexcept {
    for (auto i : flipped) x.flip(i);
}

struct Offspring {
    BitVector bits;
    std::vector<std::size_t> flipped;  // sorted
};

/// Copy of `x` with exactly k uniformly chosen bits flipped.
inline Offspring mutate_k(const BitVector& x, std::size_t k, Rng& rng) {
    Offspring y{x, {}};
    sample_flip_positions(x.size(), k, rng, y.flipped);
    apply_flips(y.bits, y.flipped);
    return y;
}

}  // namespace selfadj
