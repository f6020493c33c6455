// Command-line front end: theory curves, success-ratio sweeps, simulation
// campaigns, fixed-target curves and the rate-tracking diagnostic.

#include <CLI11.hpp>
#include <json.hpp>

#include <selfadj/selfadj.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace selfadj;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CliConfig {
    std::string command;
    std::size_t n = 1000;
    std::string s = "e-1";
    std::optional<double> F;
    std::optional<double> rho0;
    std::optional<double> rho_min;
    std::optional<double> rho_max;
    std::uint64_t seed = 1;
    std::size_t reps = 100;
    std::string out;
    std::string variant = "ea";
    double rate = 1.0;
    double eta0 = 0.0;
    double s_min = 0.1;
    double s_max = 10.0;
    double step = 0.01;
    std::vector<std::string> variants{"ea(s=4)", "rls"};
    std::string source = "theory";
    std::vector<std::string> cross;
    std::vector<double> gamma{0.1, 0.2, 0.5};
    unsigned workers = 0;
    std::uint64_t max_iter = 0;
};

// Shortest of %.15g / %.17g that reads back to the same double.
std::string real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_success_ratio(const std::string& token) {
    if (token == "e-1") return std::numbers::e - 1.0;
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw UsageError("invalid success ratio '" + token + "'");
    }
    if (used != token.size()) throw UsageError("invalid success ratio '" + token + "'");
    if (!(v > 0.0)) throw UsageError("success ratio must be positive");
    return v;
}

/// Fully resolved hyper-parameters.
ControlConfig control_config(const CliConfig& c, double s) {
    auto cc = ControlConfig::defaults(c.n, s);
    if (c.F) cc.F = *c.F;
    if (c.rho0) cc.rho0 = *c.rho0;
    if (c.rho_min) cc.rho_min = *c.rho_min;
    if (c.rho_max) cc.rho_max = *c.rho_max;
    return cc;
}

json to_json(const CliConfig& c) {
    const auto cc = control_config(c, parse_success_ratio(c.s));
    json j;
    j["command"] = c.command;
    j["n"] = c.n;
    j["s"] = c.s;
    j["F"] = cc.F;
    j["rho0"] = cc.rho0;
    j["rho_min"] = cc.rho_min;
    j["rho_max"] = cc.rho_max;
    j["seed"] = c.seed;
    j["reps"] = c.reps;
    j["out"] = c.out;
    j["variant"] = c.variant;
    j["rate"] = c.rate;
    j["eta0"] = c.eta0;
    j["s_min"] = c.s_min;
    j["s_max"] = c.s_max;
    j["step"] = c.step;
    j["variants"] = c.variants;
    j["source"] = c.source;
    j["cross"] = c.cross;
    j["gamma"] = c.gamma;
    j["workers"] = c.workers;
    j["max_iter"] = c.max_iter;
    return j;
}

// Copies keys from a config file into `c`, skipping keys whose flag was given.
void apply_config_file(const std::string& path, CliConfig& c, const std::map<std::string, const CLI::Option*>& flags) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");

    auto given = [&](const std::string& key) {
        const auto it = flags.find(key);
        return it != flags.end() && it->second->count() > 0;
    };
    try {
        for (const auto& [key, value] : j.items()) {
            if (given(key)) continue;
            if (key == "command") {
                if (c.command.empty()) c.command = value.get<std::string>();
            } else if (key == "n") c.n = value.get<std::size_t>();
            else if (key == "s") c.s = value.is_string() ? value.get<std::string>() : real(value.get<double>());
            else if (key == "F") c.F = value.get<double>();
            else if (key == "rho0") c.rho0 = value.get<double>();
            else if (key == "rho_min") c.rho_min = value.get<double>();
            else if (key == "rho_max") c.rho_max = value.get<double>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "reps") c.reps = value.get<std::size_t>();
            else if (key == "out") c.out = value.get<std::string>();
            else if (key == "variant") c.variant = value.get<std::string>();
            else if (key == "rate") c.rate = value.get<double>();
            else if (key == "eta0") c.eta0 = value.get<double>();
            else if (key == "s_min") c.s_min = value.get<double>();
            else if (key == "s_max") c.s_max = value.get<double>();
            else if (key == "step") c.step = value.get<double>();
            else if (key == "variants") c.variants = value.get<std::vector<std::string>>();
            else if (key == "source") c.source = value.get<std::string>();
            else if (key == "cross") c.cross = value.get<std::vector<std::string>>();
            else if (key == "gamma") c.gamma = value.get<std::vector<double>>();
            else if (key == "workers") c.workers = value.get<unsigned>();
            else if (key == "max_iter") c.max_iter = value.get<std::uint64_t>();
            else throw UsageError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("config file has a value of the wrong type: ") + e.what());
    }
}

/// Variant token such as "ea", "ea(s=4)" or "static(1.5936)".
struct Variant {
    std::string label;
    std::string name;
    double s = 0.0;
    double rate_mult = 1.0;
};

Variant parse_variant(const std::string& token, const CliConfig& c) {
    Variant v{token, token, parse_success_ratio(c.s), c.rate};
    const auto open = token.find('(');
    if (open != std::string::npos) {
        if (token.back() != ')') throw UsageError("malformed variant '" + token + "'");
        v.name = token.substr(0, open);
        const std::string arg = token.substr(open + 1, token.size() - open - 2);
        if (arg.rfind("s=", 0) == 0) {
            v.s = parse_success_ratio(arg.substr(2));
        } else {
            try {
                std::size_t used = 0;
                v.rate_mult = std::stod(arg, &used);
                if (used != arg.size()) throw std::invalid_argument(arg);
            } catch (const std::exception&) {
                throw UsageError("malformed variant argument in '" + token + "'");
            }
        }
    }
    static const std::vector<std::string> known{"ea",     "ea0",      "ea0-opt", "ea-opt",   "static",
                                                "static0", "rls",     "rls-opt", "ea-target", "ea0-target"};
    if (std::find(known.begin(), known.end(), v.name) == known.end()) throw UsageError("unknown variant '" + v.name + "'");
    return v;
}

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& item : raw) {
        std::string cur;
        int depth = 0;
        for (char ch : item) {
            if (ch == '(') ++depth;
            if (ch == ')') --depth;
            if (ch == ',' && depth == 0) {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

LevelSchedule theory_schedule(const Variant& v, const CliConfig& c) {
    const std::size_t n = c.n;
    if (v.name == "ea" || v.name == "ea-target") return selfadj_ea_schedule(n, SuccessRatio(v.s));
    if (v.name == "ea0" || v.name == "ea0-target") return selfadj_ea_gt0_schedule(n, SuccessRatio(v.s), c.eta0);
    if (v.name == "ea0-opt") return ea_gt0_opt_schedule(n);
    if (v.name == "ea-opt") return ea_opt_schedule(n);
    if (v.name == "static") return static_schedule(n, v.rate_mult / static_cast<double>(n));
    if (v.name == "rls") return rls_schedule(n);
    if (v.name == "rls-opt") return rls_opt_schedule(n);
    throw UsageError("variant '" + v.name + "' has no theory curve");
}

AlgorithmSpec simulation_spec(const Variant& v, const CliConfig& c) {
    const std::size_t n = c.n;
    const double rate = v.rate_mult / static_cast<double>(n);
    if (v.name == "ea") return AlgorithmSpec::self_adjusting_ea(n, control_config(c, v.s));
    if (v.name == "ea0") return AlgorithmSpec::self_adjusting_ea_gt0(n, control_config(c, v.s));
    if (v.name == "static") return AlgorithmSpec::static_ea(n, rate);
    if (v.name == "static0") return AlgorithmSpec::static_ea_gt0(n, rate);
    if (v.name == "rls") return AlgorithmSpec::rls(n);
    if (v.name == "rls-opt") return AlgorithmSpec::rls_opt(n);
    if (v.name == "ea0-opt") return AlgorithmSpec::scheduled(n, ScheduleKind::PGt0Opt);
    if (v.name == "ea-target") return AlgorithmSpec::scheduled(n, ScheduleKind::RhoStar, v.s);
    if (v.name == "ea0-target") return AlgorithmSpec::scheduled(n, ScheduleKind::HatRhoStar, v.s);
    throw UsageError("variant '" + v.name + "' cannot be simulated");
}

/// Writes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }
    bool to_file() const { return file_ != nullptr; }
    void close() {
        if (!file_) return;
        file_->flush();
        if (!*file_) throw std::runtime_error("write to output file failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

double n2(std::size_t n) { return static_cast<double>(n) * static_cast<double>(n); }

int cmd_theory(const CliConfig& c) {
    const auto v = parse_variant(c.variant, c);
    if (v.name == "static0" || v.name == "ea-target" || v.name == "ea0-target")
        throw UsageError("theory supports ea, ea0, ea0-opt, ea-opt, static, rls, rls-opt");
    const auto sch = theory_schedule(v, c);
    sch.validate();
    Sink sink(c.out);
    auto& os = sink.os();
    os << "level,rate,level_time\n";
    for (std::size_t ell = 0; ell < c.n; ++ell) {
        const double r = sch.model == MutationModel::FixedK ? static_cast<double>(sch.flips[ell]) : sch.rates[ell];
        os << ell << ',' << real(r) << ',' << real(level_time(sch, ell)) << '\n';
    }
    const double total = expected_runtime(sch);
    const std::string line = "total," + real(total) + "," + real(total / n2(c.n));
    os << line << '\n';
    sink.close();
    if (sink.to_file()) std::cout << line << '\n';
    return 0;
}

int cmd_sweep(const CliConfig& c) {
    const auto v = parse_variant(c.variant, c);
    SweepVariant sv;
    if (v.name == "ea")
        sv = SweepVariant::EA;
    else if (v.name == "ea0")
        sv = SweepVariant::EAGt0;
    else
        throw UsageError("sweep supports the variants ea and ea0");
    if (!(c.step > 0.0)) throw UsageError("--step must be positive");
    if (!(c.s_min > 0.0)) throw UsageError("--s-min must be positive");
    if (c.s_min > c.s_max) throw UsageError("--s-min must not exceed --s-max");

    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        const double s = c.s_min + static_cast<double>(i) * c.step;
        if (s > c.s_max + 1e-9 * c.step) break;
        grid.push_back(s);
    }
    const auto r = sweep_success_ratio(c.n, grid, sv, c.eta0);
    Sink sink(c.out);
    auto& os = sink.os();
    os << "s,total,normalized\n";
    for (const auto& p : r.curve.points) os << real(p.x) << ',' << real(p.value) << ',' << real(p.value / n2(c.n)) << '\n';
    const std::string line = "argmin," + real(r.argmin) + "," + real(r.min_value / n2(c.n));
    os << line << '\n';
    sink.close();
    if (sink.to_file()) std::cout << line << '\n';
    return 0;
}

Campaign make_campaign(const AlgorithmSpec& spec, const CliConfig& c, bool trace) {
    if (c.reps == 0) throw UsageError("--reps must be positive");
    Campaign camp{spec, c.reps, c.seed, {trace, 0, c.max_iter}, c.workers, {}, {}, {}};
    return camp;
}

int cmd_run(const CliConfig& c) {
    const auto v = parse_variant(c.variant, c);
    auto camp = make_campaign(simulation_spec(v, c), c, false);
    if (!c.out.empty()) {
        camp.csv_path = c.out + "_raw.csv";
        camp.json_path = c.out + "_raw.json";
        camp.summary_path = c.out + "_summary.csv";
    }
    const auto r = run_campaign(camp);
    for (const auto& w : r.stats.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "variant," << v.label << '\n'
              << "n," << c.n << '\n'
              << "runs," << r.stats.runs << '\n'
              << "timeouts," << r.stats.timeouts << '\n';
    if (r.stats.iterations.count == 0) throw std::runtime_error("every run hit the iteration cap");
    std::cout << "mean_T," << real(r.stats.iterations.mean) << '\n'
              << "sd_T," << real(r.stats.iterations.sd) << '\n'
              << "mean_T_over_n2," << real(r.stats.iterations.mean / n2(c.n)) << '\n';
    return 0;
}

int cmd_fixed_target(const CliConfig& c) {
    if (c.source != "theory" && c.source != "simulation") throw UsageError("--source must be theory or simulation");
    std::vector<std::string> tokens = split_list(c.variants);
    if (!c.cross.empty()) {
        if (c.cross.size() != 2) throw UsageError("--cross needs exactly two variants");
        for (const auto& t : c.cross)
            if (std::find(tokens.begin(), tokens.end(), t) == tokens.end()) tokens.push_back(t);
    }
    if (tokens.empty()) throw UsageError("no variants given");

    std::map<std::string, TheoryCurve> curves;
    std::vector<Variant> parsed;
    for (const auto& t : tokens) parsed.push_back(parse_variant(t, c));
    for (const auto& v : parsed) {
        if (c.source == "theory") {
            curves[v.label] = fixed_target_curve(theory_schedule(v, c));
            continue;
        }
        const auto r = run_campaign(make_campaign(simulation_spec(v, c), c, false));
        for (const auto& w : r.stats.warnings) std::cerr << "warning: " << v.label << ": " << w << '\n';
        if (r.stats.fixed_target.empty()) throw std::runtime_error("every run of " + v.label + " hit the iteration cap");
        TheoryCurve curve{"v", c.n, {}};
        for (std::size_t t = 0; t <= c.n; ++t) curve.points.push_back({static_cast<double>(t), r.stats.fixed_target[t].mean});
        curves[v.label] = std::move(curve);
    }

    Sink sink(c.out);
    auto& os = sink.os();
    os << "variant,v,expected_T\n";
    for (const auto& v : parsed)
        for (const auto& p : curves[v.label].points) os << v.label << ',' << static_cast<std::size_t>(p.x) << ',' << real(p.value) << '\n';
    sink.close();
    if (!c.cross.empty()) {
        const auto v = crossing_point(curves[c.cross[0]], curves[c.cross[1]]);
        std::cout << "crossing," << c.cross[0] << ',' << c.cross[1] << ',' << (v ? std::to_string(*v) : "none") << '\n';
    }
    return 0;
}

int cmd_diagnose(const CliConfig& c) {
    const auto v = parse_variant(c.variant, c);
    if (v.name != "ea")
        throw UsageError("diagnose tracks the self-adjusting unconditional EA only (--variant ea); got '" + v.label + "'");
    if (c.gamma.empty()) throw UsageError("--gamma needs at least one value");
    for (double g : c.gamma)
        if (!(g > 0.0 && g < 1.0)) throw UsageError("gamma values must lie in (0, 1)");
    const auto r = run_campaign(make_campaign(simulation_spec(v, c), c, true));
    for (const auto& w : r.stats.warnings) std::cerr << "warning: " << w << '\n';
    const auto rep = rate_tracking_report(r.results.runs, SuccessRatio(v.s), c.n, c.gamma);
    if (rep.insufficient_samples) std::cerr << "warning: insufficient trace samples; occupancy is unreliable\n";

    Sink sink(c.out);
    auto& os = sink.os();
    os << "gamma,occupancy\n";
    for (std::size_t g = 0; g < rep.gammas.size(); ++g) os << real(rep.gammas[g]) << ',' << real(rep.overall[g]) << '\n';
    os << "samples," << rep.samples << '\n';
    sink.close();
    return 0;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Self-adjusting (1+1) EAs on LeadingOnes: theory, sweeps, simulation"};
    app.name("selfadj");
    app.require_subcommand(0, 1);

    CliConfig c;
    std::string s_flag, config_path;
    double F = 0, rho0 = 0, rho_min = 0, rho_max = 0;
    bool show_config = false;
    std::map<std::string, const CLI::Option*> flags;

    flags["n"] = app.add_option("--n", c.n, "problem dimension");
    flags["s"] = app.add_option("--s", s_flag, "success ratio (decimal or e-1)");
    flags["F"] = app.add_option("--F", F, "update strength, > 1");
    flags["rho0"] = app.add_option("--rho0", rho0, "initial rate");
    flags["rho_min"] = app.add_option("--rho-min", rho_min, "lower rate bound");
    flags["rho_max"] = app.add_option("--rho-max", rho_max, "upper rate bound");
    flags["seed"] = app.add_option("--seed", c.seed, "base seed; run i uses seed+i");
    flags["reps"] = app.add_option("--reps", c.reps, "independent runs");
    flags["out"] = app.add_option("--out", c.out, "output path (run: file prefix)");
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    app.add_flag("--show-config", show_config, "print the resolved configuration as JSON and exit");
    flags["variant"] = app.add_option("--variant", c.variant, "ea, ea0, ea0-opt, ea-opt, static, static0, rls, rls-opt");
    flags["rate"] = app.add_option("--rate", c.rate, "static rate as a multiple of 1/n");
    flags["eta0"] = app.add_option("--eta0", c.eta0, "resampling EA cut-off margin");
    flags["s_min"] = app.add_option("--s-min", c.s_min, "sweep lower end");
    flags["s_max"] = app.add_option("--s-max", c.s_max, "sweep upper end");
    flags["step"] = app.add_option("--step", c.step, "sweep step");
    flags["variants"] = app.add_option("--variants", c.variants, "fixed-target variants, e.g. ea(s=4),rls");
    flags["source"] = app.add_option("--source", c.source, "theory or simulation");
    flags["cross"] = app.add_option("--cross", c.cross, "print the crossing point of two variants")->expected(2);
    flags["gamma"] = app.add_option("--gamma", c.gamma, "occupancy tolerances")->delimiter(',');
    flags["workers"] = app.add_option("--workers", c.workers, "worker threads (0: all cores)");
    flags["max_iter"] = app.add_option("--max-iter", c.max_iter, "iteration cap per run (0: 100 n^2)");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"theory", "per-level rates, level times and expected runtime"},
        {"sweep", "expected runtime over a success-ratio grid"},
        {"run", "simulation campaign"},
        {"fixed-target", "fixed-target curves and crossing points"},
        {"diagnose", "rate-tracking occupancy of the self-adjusting EA"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (!app.get_subcommands().empty()) c.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) apply_config_file(config_path, c, flags);
    if (flags["s"]->count() > 0) c.s = s_flag;
    if (flags["F"]->count() > 0) c.F = F;
    if (flags["rho0"]->count() > 0) c.rho0 = rho0;
    if (flags["rho_min"]->count() > 0) c.rho_min = rho_min;
    if (flags["rho_max"]->count() > 0) c.rho_max = rho_max;
    if (c.n == 0) throw UsageError("--n must be positive");
    parse_success_ratio(c.s);

    if (show_config) {
        std::cout << to_json(c).dump(2) << '\n';
        return 0;
    }
    if (c.command == "theory") return cmd_theory(c);
    if (c.command == "sweep") return cmd_sweep(c);
    if (c.command == "run") return cmd_run(c);
    if (c.command == "fixed-target") return cmd_fixed_target(c);
    if (c.command == "diagnose") return cmd_diagnose(c);
    if (c.command.empty()) {
        std::cerr << app.help();
        throw UsageError("a subcommand is required");
    }
    throw UsageError("unknown subcommand '" + c.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
