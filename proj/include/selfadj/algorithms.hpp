#pragma once

/// @file algorithms.hpp
/// @brief Elitist (1+1) loop on LeadingOnes with pluggable flip-count model
/// and mutation-rate controller.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "core.hpp"
#include "probability.hpp"

namespace selfadj {

/// Hyper-parameters of the multiplicative success-based rate update.
struct ControlConfig {
    double F = 1.1;        ///< update strength, > 1
    double s = 1.0;        ///< success ratio, > 0
    double rho0 = 1e-3;    ///< initial rate
    double rho_min = 1e-6;
    double rho_max = 0.5;

    /// F = 1 + n^(-1/3), rho0 = 1/n, rho_min = 1/n^2, rho_max = 1/2.
    static ControlConfig defaults(std::size_t n, double s) {
        const auto nd = static_cast<double>(n);
        return {1.0 + std::cbrt(1.0 / nd), s, 1.0 / nd, 1.0 / (nd * nd), 0.5};
    }

    void validate() const {
        if (!(F > 1.0)) throw std::invalid_argument("update strength F must exceed 1");
        if (!(s > 0.0)) throw std::invalid_argument("success ratio s must be positive");
        if (!(rho_min > 0.0)) throw std::invalid_argument("rho_min must be positive");
        if (!(rho_max <= 1.0)) throw std::invalid_argument("rho_max must not exceed 1");
        if (!(rho_min <= rho0 && rho0 <= rho_max)) throw std::invalid_argument("need rho_min <= rho0 <= rho_max");
    }

    friend bool operator==(const ControlConfig&, const ControlConfig&) = default;
};

enum class MutationModel {
    Unconditional,  ///< k ~ Bin(n, rho)
    Truncated,      ///< k ~ Bin(n, rho) conditioned on k >= 1
    FixedK,         ///< k chosen by the controller
};

enum class ScheduleKind { RhoStar, HatRhoStar, PGt0Opt };

namespace controller {

struct SelfAdjusting {
    ControlConfig config;
};
struct Static {
    double rate;
};
/// Rate looked up per fitness level from a precomputed, shareable table.
struct Schedule {
    ScheduleKind kind;
    std::shared_ptr<const std::vector<double>> rates;
};
struct OneBit {};
struct KOpt {
    std::shared_ptr<const std::vector<std::size_t>> flips;
};

}  // namespace controller

using RateController =
    std::variant<controller::SelfAdjusting, controller::Static, controller::Schedule, controller::OneBit, controller::KOpt>;

inline std::vector<double> schedule_rates(ScheduleKind kind, std::size_t n, double s) {
    std::vector<double> rates(n);
    for (std::size_t ell = 0; ell < n; ++ell) {
        switch (kind) {
        case ScheduleKind::RhoStar:
            rates[ell] = rho_star(ell, SuccessRatio(s));
            break;
        case ScheduleKind::HatRhoStar:
            rates[ell] = ell == 0 ? 1.0 : hat_rho_star(ell, SuccessRatio(s), n).value_or(0.0);
            break;
        case ScheduleKind::PGt0Opt:
            rates[ell] = p_gt0_opt(ell, n);
            break;
        }
    }
    return rates;
}

inline std::vector<std::size_t> k_opt_table(std::size_t n) {
    std::vector<std::size_t> ks(n);
    for (std::size_t ell = 0; ell < n; ++ell) ks[ell] = rls_k_opt(ell, n);
    return ks;
}

/// Algorithm variant: flip-count model, rate controller and dimension.
struct AlgorithmSpec {
    std::string name;
    MutationModel model = MutationModel::Unconditional;
    RateController controller = controller::Static{0.0};
    std::size_t n = 0;

    static AlgorithmSpec self_adjusting_ea(std::size_t n, const ControlConfig& c) {
        return {"ea", MutationModel::Unconditional, controller::SelfAdjusting{c}, n};
    }
    static AlgorithmSpec self_adjusting_ea_gt0(std::size_t n, const ControlConfig& c) {
        return {"ea0", MutationModel::Truncated, controller::SelfAdjusting{c}, n};
    }
    static AlgorithmSpec static_ea(std::size_t n, double rate) {
        return {"static", MutationModel::Unconditional, controller::Static{rate}, n};
    }
    static AlgorithmSpec static_ea_gt0(std::size_t n, double rate) {
        return {"static0", MutationModel::Truncated, controller::Static{rate}, n};
    }
    static AlgorithmSpec scheduled(std::size_t n, ScheduleKind kind, double s = 1.0) {
        const bool truncated = kind != ScheduleKind::RhoStar;
        const char* name = kind == ScheduleKind::RhoStar ? "ea-target" : kind == ScheduleKind::HatRhoStar ? "ea0-target" : "ea0-opt";
        auto rates = std::make_shared<const std::vector<double>>(schedule_rates(kind, n, s));
        return {name, truncated ? MutationModel::Truncated : MutationModel::Unconditional,
                controller::Schedule{kind, std::move(rates)}, n};
    }
    static AlgorithmSpec rls(std::size_t n) { return {"rls", MutationModel::FixedK, controller::OneBit{}, n}; }
    static AlgorithmSpec rls_opt(std::size_t n) {
        return {"rls-opt", MutationModel::FixedK,
                controller::KOpt{std::make_shared<const std::vector<std::size_t>>(k_opt_table(n))}, n};
    }

    const ControlConfig* control_config() const {
        const auto* sa = std::get_if<controller::SelfAdjusting>(&controller);
        return sa ? &sa->config : nullptr;
    }

    void validate() const {
        if (n == 0) throw std::invalid_argument("dimension n must be positive");
        std::visit(
            [&](const auto& c) {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, controller::SelfAdjusting>) {
                    c.config.validate();
                    if (model == MutationModel::FixedK) throw std::invalid_argument("self-adjusting rate needs a binomial model");
                } else if constexpr (std::is_same_v<C, controller::Static>) {
                    if (!(c.rate >= 0.0 && c.rate <= 1.0)) throw std::invalid_argument("static rate must lie in [0, 1]");
                    if (model == MutationModel::Truncated && c.rate == 0.0)
                        throw std::invalid_argument("resampling mutation needs a positive static rate");
                } else if constexpr (std::is_same_v<C, controller::Schedule>) {
                    if (!c.rates || c.rates->size() != n) throw std::invalid_argument("schedule must have one rate per level");
                } else if constexpr (std::is_same_v<C, controller::KOpt>) {
                    if (!c.flips || c.flips->size() != n) throw std::invalid_argument("k_opt table must have one entry per level");
                    if (model != MutationModel::FixedK) throw std::invalid_argument("k_opt controller needs the FixedK model");
                } else {
                    if (model != MutationModel::FixedK) throw std::invalid_argument("one-bit controller needs the FixedK model");
                }
            },
            controller);
    }
};

struct AlgoState {
    BitVector x;
    std::size_t fitness = 0;
    double rho = 0.0;
    std::uint64_t iteration = 0;
};

struct StepRecord {
    bool success = false;
    std::size_t fitness = 0;
    std::size_t k = 0;
};

struct TracePoint {
    std::uint64_t iteration;
    std::size_t level;
    double rho;
    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct TraceOptions {
    bool record_trace = false;
    std::size_t stride = 0;             ///< 0 selects max(1, n/10)
    std::uint64_t max_iterations = 0;   ///< 0 selects 100 n^2
};

struct RunResult {
    std::uint64_t seed = 0;
    std::uint64_t iterations = 0;  ///< offspring evaluations; the initial point is not counted
    bool timed_out = false;
    std::size_t initial_fitness = 0;
    /// First iteration at which fitness >= v, for v = 0..(best fitness reached).
    /// Has n+1 entries unless the run timed out.
    std::vector<std::uint64_t> fixed_target;
    std::vector<TracePoint> trace;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// One run of the (1+1) scheme: owns the search point, the rate and the RNG.
class OnePlusOne {
public:
    OnePlusOne(AlgorithmSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed) {
        spec_.validate();
        state_.x = BitVector::random(spec_.n, rng_);
        state_.fitness = leading_ones(state_.x);
        state_.rho = initial_rate();
    }

    /// Starts from a prepared point instead of a random one.
    OnePlusOne(AlgorithmSpec spec, std::uint64_t seed, BitVector start) : spec_(std::move(spec)), rng_(seed) {
        spec_.validate();
        if (start.size() != spec_.n) throw std::invalid_argument("start point has wrong length");
        state_.x = std::move(start);
        state_.fitness = leading_ones(state_.x);
        state_.rho = initial_rate();
    }

    const AlgoState& state() const noexcept { return state_; }
    const AlgorithmSpec& spec() const noexcept { return spec_; }
    bool done() const noexcept { return state_.fitness == spec_.n; }

    /// Current rate, or for FixedK controllers the flip count as a real.
    double current_rate() const noexcept { return state_.rho; }

    StepRecord step() {
        if (done()) throw std::logic_error("step called at the optimum");
        const std::size_t k = draw_flip_count();
        sample_flip_positions(spec_.n, k, rng_, flips_);
        return evaluate_offspring();
    }

    /// Same as step() but with a caller-chosen flip set (sorted, distinct).
    StepRecord step_with(std::vector<std::size_t> flipped) {
        if (done()) throw std::logic_error("step called at the optimum");
        flips_ = std::move(flipped);
        return evaluate_offspring();
    }

private:
    StepRecord evaluate_offspring() {
        const std::size_t k = flips_.size();
        const std::size_t child = incremental_leading_ones(state_.x, state_.fitness, flips_);
        const bool success = child >= state_.fitness;
        if (success) {
            apply_flips(state_.x, flips_);
            state_.fitness = child;
        }
        ++state_.iteration;
        update_rate(success);
        return {success, state_.fitness, k};
    }

    double level_rate() const {
        return std::visit(
            [&](const auto& c) -> double {
                using C = std::decay_t<decltype(c)>;
                const std::size_t ell = std::min(state_.fitness, spec_.n - 1);
                if constexpr (std::is_same_v<C, controller::SelfAdjusting>)
                    return state_.rho;
                else if constexpr (std::is_same_v<C, controller::Static>)
                    return c.rate;
                else if constexpr (std::is_same_v<C, controller::Schedule>)
                    return (*c.rates)[ell];
                else if constexpr (std::is_same_v<C, controller::KOpt>)
                    return static_cast<double>((*c.flips)[ell]);
                else
                    return 1.0;
            },
            spec_.controller);
    }

    double initial_rate() const {
        if (const auto* c = spec_.control_config()) return c->rho0;
        return level_rate();
    }

    std::size_t draw_flip_count() {
        switch (spec_.model) {
        case MutationModel::Unconditional:
            return sample_binomial(spec_.n, state_.rho, rng_);
        case MutationModel::Truncated:
            // rate 0 is the rho -> 0 limit of the truncated law: exactly one flip
            return state_.rho > 0.0 ? sample_binomial_positive(spec_.n, state_.rho, rng_) : 1;
        case MutationModel::FixedK:
            return static_cast<std::size_t>(state_.rho);
        }
        return 0;
    }

    void update_rate(bool success) {
        if (const auto* sa = std::get_if<controller::SelfAdjusting>(&spec_.controller)) {
            const auto& c = sa->config;
            if (success)
                state_.rho = std::min(state_.rho * grow_factor(c), c.rho_max);
            else
                state_.rho = std::max(state_.rho / c.F, c.rho_min);
        } else if (!done()) {
            state_.rho = level_rate();
        }
    }

    double grow_factor(const ControlConfig& c) {
        if (!grow_) grow_ = std::pow(c.F, c.s);
        return *grow_;
    }

    AlgorithmSpec spec_;
    Rng rng_;
    AlgoState state_;
    std::vector<std::size_t> flips_;
    std::optional<double> grow_;
};

inline std::size_t default_trace_stride(std::size_t n) { return std::max<std::size_t>(1, n / 10); }

/// Runs from a uniformly random start until the optimum or the iteration cap.
inline RunResult run_to_optimum(const AlgorithmSpec& spec, std::uint64_t seed, const TraceOptions& options = {}) {
    OnePlusOne algo(spec, seed);
    const std::size_t n = spec.n;
    const std::uint64_t cap =
        options.max_iterations > 0 ? options.max_iterations : 100ull * static_cast<std::uint64_t>(n) * n;
    const std::size_t stride = options.stride > 0 ? options.stride : default_trace_stride(n);

    RunResult result;
    result.seed = seed;
    result.initial_fitness = algo.state().fitness;
    result.fixed_target.reserve(n + 1);
    result.fixed_target.assign(algo.state().fitness + 1, 0);

    std::uint64_t next_trace = 0;
    while (!algo.done()) {
        const auto& st = algo.state();
        if (st.iteration >= cap) {
            result.timed_out = true;
            break;
        }
        if (options.record_trace && st.iteration == next_trace) {
            result.trace.push_back({st.iteration, st.fitness, algo.current_rate()});
            next_trace += stride;
        }
        const std::size_t before = st.fitness;
        const auto rec = algo.step();
        if (rec.fitness > before) result.fixed_target.resize(rec.fitness + 1, algo.state().iteration);
    }
    result.iterations = algo.state().iteration;
    return result;
}

}  // namespace selfadj
