#pragma once

/// @file experiment.hpp
/// @brief Seeded Monte Carlo campaigns, aggregation, rate-tracking
/// diagnostics and CSV/JSON persistence.
///
/// Run i of a campaign uses seed base_seed + i. Runs may execute on several
/// worker threads, but results are stored and folded in run-index order, so
/// every output is a function of (spec, base_seed, repetitions) only.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "algorithms.hpp"
#include "numeric.hpp"
#include "probability.hpp"

namespace selfadj {

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;
};

/// Linear-interpolation quantile of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline Summary summarize(std::vector<double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    numeric::CompensatedSum sum;
    for (double v : values) sum += v;
    s.mean = sum.value() / static_cast<double>(values.size());
    if (values.size() > 1) {
        numeric::CompensatedSum sq;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(sq.value() / static_cast<double>(values.size() - 1));
    }
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    s.mean = std::clamp(s.mean, s.min, s.max);
    s.q05 = quantile_sorted(values, 0.05);
    s.q50 = quantile_sorted(values, 0.50);
    s.q95 = quantile_sorted(values, 0.95);
    return s;
}

struct AggregateStats {
    std::size_t runs = 0;
    std::size_t timeouts = 0;
    Summary iterations;                 ///< over completed runs
    std::vector<Summary> fixed_target;  ///< index v, over completed runs
    std::vector<std::string> warnings;
};

inline AggregateStats aggregate(std::span<const RunResult> runs, std::size_t n) {
    AggregateStats stats;
    stats.runs = runs.size();
    std::vector<const RunResult*> done;
    for (const auto& r : runs) {
        if (r.timed_out)
            ++stats.timeouts;
        else
            done.push_back(&r);
    }
    if (stats.timeouts > 0)
        stats.warnings.push_back(std::to_string(stats.timeouts) + " run(s) hit the iteration cap and are excluded from the statistics");

    std::vector<double> buf;
    buf.reserve(done.size());
    for (const auto* r : done) buf.push_back(static_cast<double>(r->iterations));
    stats.iterations = summarize(buf);

    if (!done.empty()) {
        stats.fixed_target.resize(n + 1);
        for (std::size_t v = 0; v <= n; ++v) {
            buf.clear();
            for (const auto* r : done) buf.push_back(static_cast<double>(r->fixed_target[v]));
            stats.fixed_target[v] = summarize(buf);
        }
    }
    return stats;
}

/// Configuration echo written alongside raw results.
struct ExportConfig {
    std::string variant;
    std::size_t n = 0;
    std::optional<double> s;
    std::optional<double> F;
    std::optional<double> rho0;
    std::optional<double> rho_min;
    std::optional<double> rho_max;
    std::uint64_t base_seed = 0;

    static ExportConfig describe(const AlgorithmSpec& spec, std::uint64_t base_seed) {
        ExportConfig c{spec.name, spec.n, {}, {}, {}, {}, {}, base_seed};
        if (const auto* cc = spec.control_config()) {
            c.s = cc->s;
            c.F = cc->F;
            c.rho0 = cc->rho0;
            c.rho_min = cc->rho_min;
            c.rho_max = cc->rho_max;
        } else if (const auto* st = std::get_if<controller::Static>(&spec.controller)) {
            c.rho0 = st->rate;
        }
        return c;
    }

    friend bool operator==(const ExportConfig&, const ExportConfig&) = default;
};

struct ResultSet {
    ExportConfig config;
    std::vector<RunResult> runs;  ///< index = run_index

    friend bool operator==(const ResultSet&, const ResultSet&) = default;
};

enum class ExportFormat { Csv, Json };

inline constexpr const char* kCsvHeader = "variant,n,s,F,rho0,rho_min,rho_max,seed,run_index,target,hit_iteration";

namespace detail {

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
inline std::string format_opt(const std::optional<double>& v) { return v ? format_real(*v) : std::string{}; }

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

inline void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

inline nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }
inline std::optional<double> json_opt(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace detail

inline void write_csv(const ResultSet& results, std::ostream& out) {
    const auto& c = results.config;
    const std::string prefix = c.variant + "," + std::to_string(c.n) + "," + detail::format_opt(c.s) + "," +
                               detail::format_opt(c.F) + "," + detail::format_opt(c.rho0) + "," +
                               detail::format_opt(c.rho_min) + "," + detail::format_opt(c.rho_max) + ",";
    out << kCsvHeader << '\n';
    for (std::size_t i = 0; i < results.runs.size(); ++i) {
        const auto& r = results.runs[i];
        for (std::size_t v = 0; v < r.fixed_target.size(); ++v)
            out << prefix << r.seed << ',' << i << ',' << v << ',' << r.fixed_target[v] << '\n';
    }
}

inline nlohmann::json to_json(const ResultSet& results) {
    using nlohmann::json;
    const auto& c = results.config;
    json j;
    j["config"] = {{"variant", c.variant},       {"n", c.n},
                   {"s", detail::opt_json(c.s)}, {"F", detail::opt_json(c.F)},
                   {"rho0", detail::opt_json(c.rho0)}, {"rho_min", detail::opt_json(c.rho_min)},
                   {"rho_max", detail::opt_json(c.rho_max)}, {"base_seed", c.base_seed}};
    json runs = json::array();
    for (std::size_t i = 0; i < results.runs.size(); ++i) {
        const auto& r = results.runs[i];
        json targets = json::array();
        for (std::size_t v = 0; v < r.fixed_target.size(); ++v)
            targets.push_back({{"target", v}, {"hit_iteration", r.fixed_target[v]}});
        json run = {{"run_index", i},
                    {"seed", r.seed},
                    {"iterations", r.iterations},
                    {"timed_out", r.timed_out},
                    {"initial_fitness", r.initial_fitness},
                    {"targets", std::move(targets)}};
        if (!r.trace.empty()) {
            json trace = json::array();
            for (const auto& p : r.trace) trace.push_back({p.iteration, p.level, p.rho});
            run["trace"] = std::move(trace);
        }
        runs.push_back(std::move(run));
    }
    j["runs"] = std::move(runs);
    return j;
}

inline ResultSet from_json(const nlohmann::json& j) {
    ResultSet rs;
    const auto& c = j.at("config");
    rs.config.variant = c.at("variant").get<std::string>();
    rs.config.n = c.at("n").get<std::size_t>();
    rs.config.s = detail::json_opt(c.at("s"));
    rs.config.F = detail::json_opt(c.at("F"));
    rs.config.rho0 = detail::json_opt(c.at("rho0"));
    rs.config.rho_min = detail::json_opt(c.at("rho_min"));
    rs.config.rho_max = detail::json_opt(c.at("rho_max"));
    rs.config.base_seed = c.at("base_seed").get<std::uint64_t>();
    for (const auto& run : j.at("runs")) {
        RunResult r;
        r.seed = run.at("seed").get<std::uint64_t>();
        r.iterations = run.at("iterations").get<std::uint64_t>();
        r.timed_out = run.at("timed_out").get<bool>();
        r.initial_fitness = run.at("initial_fitness").get<std::size_t>();
        for (const auto& t : run.at("targets")) r.fixed_target.push_back(t.at("hit_iteration").get<std::uint64_t>());
        if (run.contains("trace"))
            for (const auto& p : run.at("trace"))
                r.trace.push_back({p.at(0).get<std::uint64_t>(), p.at(1).get<std::size_t>(), p.at(2).get<double>()});
        rs.runs.push_back(std::move(r));
    }
    return rs;
}

inline void export_results(const ResultSet& results, ExportFormat format, const std::filesystem::path& path) {
    if (results.runs.empty()) throw std::invalid_argument("export: no results");
    auto out = detail::open_for_write(path);
    if (format == ExportFormat::Csv)
        write_csv(results, out);
    else
        out << to_json(results).dump() << '\n';
    detail::finish_write(out, path);
}

inline ResultSet import_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return from_json(nlohmann::json::parse(in));
}

/// Per-target aggregate as CSV: target,mean,sd,q05,q50,q95,runs.
inline void export_summary(const AggregateStats& stats, const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    out << "target,mean,sd,q05,q50,q95,runs\n";
    for (std::size_t v = 0; v < stats.fixed_target.size(); ++v) {
        const auto& s = stats.fixed_target[v];
        out << v << ',' << detail::format_real(s.mean) << ',' << detail::format_real(s.sd) << ','
            << detail::format_real(s.q05) << ',' << detail::format_real(s.q50) << ',' << detail::format_real(s.q95)
            << ',' << s.count << '\n';
    }
    detail::finish_write(out, path);
}

struct Campaign {
    AlgorithmSpec spec;
    std::size_t repetitions = 1;
    std::uint64_t base_seed = 0;
    TraceOptions trace;
    unsigned workers = 0;  ///< 0 selects the hardware concurrency
    std::optional<std::filesystem::path> csv_path;
    std::optional<std::filesystem::path> json_path;
    std::optional<std::filesystem::path> summary_path;
};

struct CampaignResult {
    ResultSet results;
    AggregateStats stats;
};

inline CampaignResult run_campaign(const Campaign& c) {
    if (c.repetitions == 0) throw std::invalid_argument("campaign needs at least one repetition");
    c.spec.validate();

    std::vector<RunResult> runs(c.repetitions);
    unsigned workers = c.workers > 0 ? c.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, c.repetitions));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < c.repetitions; i = next++)
            runs[i] = run_to_optimum(c.spec, c.base_seed + i, c.trace);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    CampaignResult out{{ExportConfig::describe(c.spec, c.base_seed), std::move(runs)}, {}};
    out.stats = aggregate(out.results.runs, c.spec.n);
    if (c.csv_path) export_results(out.results, ExportFormat::Csv, *c.csv_path);
    if (c.json_path) export_results(out.results, ExportFormat::Json, *c.json_path);
    if (c.summary_path) export_summary(out.stats, *c.summary_path);
    return out;
}

struct OccupancyRow {
    std::size_t level = 0;
    std::size_t samples = 0;
    std::vector<double> fraction;  ///< one per gamma
};

struct OccupancyReport {
    std::vector<double> gammas;
    std::vector<double> overall;  ///< one per gamma, over all qualifying samples
    std::size_t samples = 0;
    std::vector<OccupancyRow> levels;
    bool insufficient_samples = false;
};

/// Fraction of traced iterations, on levels ell >= sqrt(n), whose rate lies
/// within a factor [1-gamma, 1+gamma] of the target rate rho_star(ell, s).
/// Flags insufficient samples when some run was traced at fewer than two
/// iterations.
inline OccupancyReport rate_tracking_report(std::span<const RunResult> runs, SuccessRatio s, std::size_t n,
                                            std::vector<double> gammas = {0.1, 0.2, 0.5}) {
    if (gammas.empty()) throw std::invalid_argument("rate_tracking_report: no gamma values");
    bool any = false;
    for (const auto& r : runs) any = any || !r.trace.empty();
    if (!any) throw std::invalid_argument("rate_tracking_report: no trace samples (record traces first)");

    OccupancyReport rep;
    rep.gammas = gammas;
    std::vector<std::vector<std::size_t>> hits(n, std::vector<std::size_t>(gammas.size(), 0));
    std::vector<std::size_t> counts(n, 0);
    for (const auto& r : runs) {
        if (r.trace.size() < 2) rep.insufficient_samples = true;
        for (const auto& p : r.trace) {
            if (p.level >= n || p.level * p.level < n) continue;
            const double target = rho_star(p.level, s);
            ++counts[p.level];
            for (std::size_t g = 0; g < gammas.size(); ++g)
                if (p.rho >= (1.0 - gammas[g]) * target && p.rho <= (1.0 + gammas[g]) * target) ++hits[p.level][g];
        }
    }

    std::vector<std::size_t> total_hits(gammas.size(), 0);
    for (std::size_t ell = 0; ell < n; ++ell) {
        if (counts[ell] == 0) continue;
        OccupancyRow row{ell, counts[ell], {}};
        for (std::size_t g = 0; g < gammas.size(); ++g) {
            row.fraction.push_back(static_cast<double>(hits[ell][g]) / static_cast<double>(counts[ell]));
            total_hits[g] += hits[ell][g];
        }
        rep.samples += counts[ell];
        rep.levels.push_back(std::move(row));
    }
    if (rep.samples == 0) rep.insufficient_samples = true;
    for (std::size_t g = 0; g < gammas.size(); ++g)
        rep.overall.push_back(rep.samples ? static_cast<double>(total_hits[g]) / static_cast<double>(rep.samples) : 0.0);
    return rep;
}

}  // namespace selfadj
