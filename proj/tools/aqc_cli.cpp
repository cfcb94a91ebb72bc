// Batch experiment driver: adaptive-sweep scaling studies, the 3-SAT
// pipeline, Zeno sweeps, and instance tooling, all writing reproducible CSV.
//
// Usage: aqc_cli <subcommand> [path] [--config PATH] [--seed N] [--out DIR]
//                [--parallelism N] [--measure energy|qfi] [--step-log]
//
// Subcommands: lz-scaling, sat-scaling, zeno-sweep, gen-instances,
// solve-instance. Configuration comes from a flat key-value file with
// [section] headers; environment variables with the AQC_ prefix
// (AQC_SECTION_KEY) override file values, and flags override both.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aqc/experiments.hpp"

extern char** environ;

namespace {

namespace fs = std::filesystem;
using namespace aqc;

struct CliArgs {
    std::string command;
    std::string path; // positional argument (solve-instance)
    std::string config_path;
    std::string out; // kept outside cfg so the config hash ignores it
    bool step_log = false;
    io::Config cfg; // effective configuration after overrides
};

[[noreturn]] void usage(const std::string& error = "") {
    if (!error.empty()) std::cerr << "error: " << error << "\n";
    std::cerr << "usage: aqc_cli <lz-scaling|sat-scaling|zeno-sweep|gen-instances|"
                 "solve-instance> [path]\n"
                 "               [--config PATH] [--seed N] [--out DIR] [--parallelism N]\n"
                 "               [--measure energy|qfi] [--step-log]\n";
    std::exit(2);
}

void apply_env_overrides(io::Config& cfg) {
    for (char** e = environ; *e; ++e) {
        const std::string entry(*e);
        if (entry.rfind("AQC_", 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string key = entry.substr(4, eq - 4);
        const std::string value = entry.substr(eq + 1);
        const auto us = key.find('_');
        if (us == std::string::npos) continue;
        for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        key[us] = '.';
        cfg.set(key, value);
    }
}

CliArgs parse_args(int argc, char** argv) {
    CliArgs args;
    if (argc < 2) usage("missing subcommand");
    args.command = argv[1];
    std::string seed, out, parallelism, measure;
    for (int i = 2; i < argc; ++i) {
        const std::string a = argv[i];
        auto next = [&](const char* flag) -> std::string {
            if (i + 1 >= argc) usage(std::string(flag) + " needs a value");
            return argv[++i];
        };
        if (a == "--config") {
            args.config_path = next("--config");
        } else if (a == "--seed") {
            seed = next("--seed");
        } else if (a == "--out") {
            out = next("--out");
        } else if (a == "--parallelism") {
            parallelism = next("--parallelism");
        } else if (a == "--measure") {
            measure = next("--measure");
        } else if (a == "--step-log") {
            args.step_log = true;
        } else if (!a.empty() && a[0] == '-') {
            usage("unknown flag " + a);
        } else if (args.path.empty()) {
            args.path = a;
        } else {
            usage("unexpected argument " + a);
        }
    }
    if (!args.config_path.empty()) args.cfg = io::Config::load(args.config_path);
    apply_env_overrides(args.cfg);
    if (!seed.empty()) args.cfg.set("run.seed", seed);
    args.out = out.empty() ? args.cfg.get_string("run.out", "out") : out;
    if (!parallelism.empty()) args.cfg.set("run.parallelism", parallelism);
    if (!measure.empty()) args.cfg.set("run.measure", measure);
    return args;
}

ErrorMeasure parse_measure(const std::string& name) {
    if (name == "energy") return ErrorMeasure::EnergyDiff;
    if (name == "qfi") return ErrorMeasure::QfiDiff;
    throw std::invalid_argument("unknown measure '" + name + "' (want energy or qfi)");
}

fs::path out_dir(const CliArgs& args) {
    fs::path dir = args.out;
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    return out;
}

/// Run manifest: output paths and wall-clock, traceable to (config hash,
/// seed). Kept out of the data CSVs so those stay byte-identical across
/// reruns.
class Manifest {
  public:
    Manifest(const fs::path& dir, const io::Config& cfg)
        : path_(dir / "run_manifest.txt"), start_(std::chrono::steady_clock::now()) {
        body_ << "config_hash=" << cfg.hash() << "\n";
        body_ << "seed=" << cfg.get_int("run.seed", 1) << "\n";
        body_ << "version=" << io::code_version << "\n";
    }

    void output(const fs::path& p) { body_ << "output=" << p.string() << "\n"; }

    ~Manifest() {
        const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                           start_)
                                 .count();
        body_ << "wall_clock_s=" << io::format_double(elapsed) << "\n";
        std::ofstream out(path_);
        out << body_.str();
    }

  private:
    fs::path path_;
    std::chrono::steady_clock::time_point start_;
    std::ostringstream body_;
};

void write_fit_row(io::CsvWriter& csv, const std::string& label,
                   const std::optional<analysis::FitResult>& fit) {
    if (!fit) return;
    const auto& p = fit->params;
    csv.row(label, analysis::fit_model_name(fit->model), p.size() > 0 ? p[0] : 0.0,
            p.size() > 1 ? p[1] : 0.0, p.size() > 2 ? p[2] : 0.0, fit->adjusted_r2,
            static_cast<int>(fit->residuals.size()));
}

// ---------------------------------------------------------------------------
// lz-scaling
// ---------------------------------------------------------------------------

int cmd_lz_scaling(const CliArgs& args) {
    const auto& cfg = args.cfg;
    experiments::LzScalingConfig lz;
    lz.dt_grid = cfg.get_list("lz.dt_grid", lz.dt_grid);
    lz.eps_grid = experiments::logspace(cfg.get_double("lz.eps_lo", 1e-10),
                                        cfg.get_double("lz.eps_hi", 5e-5),
                                        static_cast<int>(cfg.get_int("lz.eps_count", 8)));
    lz.delta = cfg.get_double("lz.delta", lz.delta);
    lz.v0c_energy = cfg.get_double("lz.v0c_energy", lz.v0c_energy);
    lz.v0c_qfi = cfg.get_double("lz.v0c_qfi", lz.v0c_qfi);
    lz.window_time = cfg.get_double("lz.window_time", lz.window_time);
    lz.seed = cfg.get_int("run.seed", 1);
    lz.parallelism = static_cast<int>(cfg.get_int("run.parallelism", 1));
    if (cfg.has("run.measure")) lz.measures = {parse_measure(cfg.get_string("run.measure"))};
    if (lz.dt_grid.empty() || lz.eps_grid.empty()) {
        throw std::invalid_argument("lz-scaling: empty parameter grid");
    }

    const auto result = experiments::run_lz_scaling(lz);

    const fs::path dir = out_dir(args);
    Manifest manifest(dir, cfg);
    {
        auto out = open_output(dir / "lz_scaling.csv");
        experiments::write_lz_scaling_csv(result, lz.delta, out, cfg.hash(), lz.seed);
        manifest.output(dir / "lz_scaling.csv");
    }
    {
        auto out = open_output(dir / "lz_fits.csv");
        io::CsvWriter csv(out, cfg.hash(), lz.seed, io::code_version,
                          {"measure", "model", "a", "b", "c", "adjusted_r2", "n_points"},
                          {"-", "-", "1", "1", "1", "1", "1"});
        write_fit_row(csv, "energy", result.fit_energy);
        write_fit_row(csv, "qfi", result.fit_qfi);
        manifest.output(dir / "lz_fits.csv");
    }

    int failed = 0;
    for (const auto& r : result.rows) failed += r.error.empty() ? 0 : 1;
    std::cout << "lz-scaling: " << result.rows.size() << " grid points, " << failed
              << " failed\n";
    auto report = [](const char* name, const std::optional<analysis::FitResult>& fit) {
        if (!fit) return;
        std::cout << "  " << name << ": a=" << io::format_double(fit->params[0])
                  << " b=" << io::format_double(fit->params[1])
                  << " adjusted_r2=" << io::format_double(fit->adjusted_r2) << "\n";
    };
    report("energy", result.fit_energy);
    report("qfi", result.fit_qfi);
    return 0;
}

// ---------------------------------------------------------------------------
// sat-scaling
// ---------------------------------------------------------------------------

int cmd_sat_scaling(const CliArgs& args) {
    const auto& cfg = args.cfg;
    experiments::SatScalingConfig sat;
    sat.n_min = static_cast<int>(cfg.get_int("sat.n_min", sat.n_min));
    sat.n_max = static_cast<int>(cfg.get_int("sat.n_max", sat.n_max));
    sat.generated_per_n = static_cast<int>(cfg.get_int("sat.generated_per_n", sat.generated_per_n));
    sat.hard_per_n = static_cast<int>(cfg.get_int("sat.hard_per_n", sat.hard_per_n));
    sat.alpha = cfg.get_double("sat.alpha", sat.alpha);
    sat.eps_max = cfg.get_double("sat.eps_max", sat.eps_max);
    sat.dt = cfg.get_double("sat.dt", sat.dt);
    sat.delta = cfg.get_double("sat.delta", sat.delta);
    sat.seed = cfg.get_int("run.seed", 1);
    sat.parallelism = static_cast<int>(cfg.get_int("run.parallelism", 1));
    if (cfg.has("run.measure")) sat.measure = parse_measure(cfg.get_string("run.measure"));

    const auto result = experiments::run_sat_scaling(
        sat, [](const std::string& msg) { std::cout << "sat-scaling: " << msg << "\n"; });

    const fs::path dir = out_dir(args);
    Manifest manifest(dir, cfg);
    {
        auto out = open_output(dir / "sat_instances.csv");
        io::CsvWriter csv(out, cfg.hash(), sat.seed, io::code_version,
                          {"n", "index", "instance_seed", "dpll_iterations", "T",
                           "ground_fidelity", "steps", "error"},
                          {"1", "1", "1", "1", "1/J", "1", "1", "-"});
        for (const auto& r : result.rows) {
            csv.row(r.n, r.index, r.seed, r.dpll_iterations, r.total_time, r.ground_fidelity,
                    r.steps, r.error.empty() ? "ok" : r.error);
        }
        manifest.output(dir / "sat_instances.csv");
    }
    {
        auto out = open_output(dir / "sat_stats.csv");
        io::CsvWriter csv(out, cfg.hash(), sat.seed, io::code_version,
                          {"n", "mean_T", "std_T", "std_over_mean", "best_offsets",
                           "worst_offsets"},
                          {"1", "1/J", "1/J", "1", "1/J", "1/J"});
        auto join = [](const std::vector<double>& xs) {
            std::string s;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (i) s += ";";
                s += io::format_double(xs[i]);
            }
            return s;
        };
        for (const auto& [n, st] : result.stats_per_n) {
            csv.row(n, st.mean_t, st.std_t, st.std_t / st.mean_t, join(st.best_offsets),
                    join(st.worst_offsets));
        }
        manifest.output(dir / "sat_stats.csv");
    }
    {
        auto out = open_output(dir / "sat_fits.csv");
        io::CsvWriter csv(out, cfg.hash(), sat.seed, io::code_version,
                          {"series", "model", "a", "b", "c", "adjusted_r2", "n_points"},
                          {"-", "-", "1", "1", "1", "1", "1"});
        write_fit_row(csv, "mean_T_vs_n", result.fit_linear);
        write_fit_row(csv, "mean_T_vs_n", result.fit_quadratic);
        write_fit_row(csv, "mean_T_vs_n", result.fit_exponential);
        manifest.output(dir / "sat_fits.csv");
    }

    std::cout << "sat-scaling: " << result.rows.size() << " instances, " << result.failed_runs
              << " failed\n";
    // ensemble-width trend, reported without judging a threshold
    for (const auto& [n, st] : result.stats_per_n) {
        std::cout << "  n=" << n << " mean_T=" << io::format_double(st.mean_t)
                  << " std_T=" << io::format_double(st.std_t)
                  << " std/mean=" << io::format_double(st.std_t / st.mean_t) << "\n";
    }
    auto report = [](const char* name, const std::optional<analysis::FitResult>& fit) {
        if (!fit) return;
        std::cout << "  " << name
                  << ": adjusted_r2=" << io::format_double(fit->adjusted_r2) << "\n";
    };
    report("linear", result.fit_linear);
    report("quadratic", result.fit_quadratic);
    report("exponential", result.fit_exponential);
    return 0;
}

// ---------------------------------------------------------------------------
// zeno-sweep
// ---------------------------------------------------------------------------

int cmd_zeno_sweep(const CliArgs& args) {
    const auto& cfg = args.cfg;
    const HamiltonianFamily family = models::lz_family();

    experiments::ZenoPairConfig pair;
    pair.dt = cfg.get_double("zeno.dt", pair.dt);
    pair.delta = cfg.get_double("zeno.delta", pair.delta);
    pair.measure = parse_measure(cfg.has("run.measure") ? cfg.get_string("run.measure")
                                                        : cfg.get_string("zeno.measure", "energy"));
    pair.target_t_fast = cfg.get_double("zeno.nonadiabatic_target_t", pair.target_t_fast);
    pair.target_t_slow = cfg.get_double("zeno.adiabatic_target_t", pair.target_t_slow);
    pair.eps_fast = cfg.get_double("zeno.nonadiabatic_eps", pair.eps_fast);
    pair.eps_slow = cfg.get_double("zeno.adiabatic_eps", pair.eps_slow);
    pair.v0c_fast = cfg.get_double("zeno.nonadiabatic_v0c", pair.v0c_fast);
    pair.v0_fast = cfg.get_double("zeno.nonadiabatic_v0", pair.v0_fast);
    pair.v0c_slow = cfg.get_double("zeno.adiabatic_v0c", pair.v0c_slow);
    pair.v0_slow = cfg.get_double("zeno.adiabatic_v0", pair.v0_slow);
    pair.t_z_over_t_grid = experiments::logspace(
        cfg.get_double("zeno.tz_over_t_lo", 0.003), cfg.get_double("zeno.tz_over_t_hi", 0.3),
        static_cast<int>(cfg.get_int("zeno.tz_count", 11)));
    pair.seed = cfg.get_int("run.seed", 1);

    const auto result = experiments::run_zeno_pair(family, pair);

    const fs::path dir = out_dir(args);
    Manifest manifest(dir, cfg);
    auto out = open_output(dir / "zeno_sweep.csv");
    io::CsvWriter csv(out, cfg.hash(), pair.seed, io::code_version,
                      {"base", "T", "t_z", "t_z_over_t", "infidelity", "failure_prob", "n_z"},
                      {"-", "1/J", "1/J", "1", "1", "1", "1"});
    auto emit = [&](const char* label, const experiments::ZenoSweepResult& sweep, double eps) {
        // no-measurement baseline row first
        csv.row(label, sweep.plain_total_time, 0.0, 0.0, sweep.plain_infidelity, 0.0, 0);
        for (const auto& r : sweep.rows) {
            csv.row(label, sweep.plain_total_time, r.t_z, r.t_z_over_t, r.infidelity,
                    r.failure_prob, r.n_z);
        }
        std::cout << "zeno-sweep: " << label << " eps_max=" << io::format_double(eps)
                  << " T=" << io::format_double(sweep.plain_total_time)
                  << " plain_infidelity=" << io::format_double(sweep.plain_infidelity) << "\n";
    };
    emit("nonadiabatic", result.fast, result.eps_fast);
    emit("adiabatic", result.slow, result.eps_slow);
    manifest.output(dir / "zeno_sweep.csv");
    return 0;
}

// ---------------------------------------------------------------------------
// gen-instances
// ---------------------------------------------------------------------------

int cmd_gen_instances(const CliArgs& args) {
    const auto& cfg = args.cfg;
    const int n = static_cast<int>(cfg.get_int("gen.n", 12));
    const double alpha = cfg.get_double("gen.alpha", 4.4);
    const int count = static_cast<int>(cfg.get_int("gen.count", 1000));
    const std::uint64_t seed = cfg.get_int("run.seed", 1);
    if (count < 0) throw std::invalid_argument("gen-instances: count must be >= 0");

    const fs::path dir = out_dir(args);
    Manifest manifest(dir, cfg);
    auto out = open_output(dir / "instances_manifest.csv");
    io::CsvWriter csv(out, cfg.hash(), seed, io::code_version,
                      {"index", "file", "n", "alpha", "instance_seed", "dpll_iterations",
                       "satisfiable"},
                      {"1", "-", "1", "1", "1", "1", "bool"});
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = io::derive_seed(seed, static_cast<std::uint64_t>(n) * 1000003 + i);
        const auto inst = models::generate_instance(n, alpha, s);
        std::ostringstream name;
        name << "sat_n" << n << "_a" << io::format_double(alpha) << "_s" << s << "_i" << i
             << ".cnf";
        auto file = open_output(dir / name.str());
        file << models::emit_dimacs(inst);
        const auto solved = models::dpll_solve(inst);
        csv.row(i, name.str(), n, alpha, s, solved.iterations, solved.satisfiable ? "1" : "0");
    }
    manifest.output(dir / "instances_manifest.csv");
    std::cout << "gen-instances: wrote " << count << " instances to " << dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// solve-instance
// ---------------------------------------------------------------------------

int cmd_solve_instance(const CliArgs& args) {
    if (args.path.empty()) usage("solve-instance needs a DIMACS file path");
    const auto& cfg = args.cfg;
    std::ifstream in(args.path);
    if (!in) {
        std::cerr << "error: cannot open " << args.path << "\n";
        return 1;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    models::SatInstance inst;
    try {
        inst = models::parse_dimacs(ss.str());
    } catch (const models::DimacsError& e) {
        std::cerr << "error: " << args.path << ": " << e.what() << "\n";
        return 1;
    }

    const auto begin_field = cfg.get_string("solve.begin_field", "farhi") == "uniform"
                                 ? models::BeginField::Uniform
                                 : models::BeginField::Farhi;
    const auto sat_h = models::sat_hamiltonians(inst, begin_field);
    AdaptiveParams params;
    params.eps_max = cfg.get_double("solve.eps_max", 3.4e-6);
    params.dt = cfg.get_double("solve.dt", 0.1);
    params.delta = cfg.get_double("solve.delta", 0.5);
    params.substep = SubstepControl{1e-10, 10, 10};
    if (cfg.has("run.measure")) params.measure = parse_measure(cfg.get_string("run.measure"));

    const Trajectory traj = run_adiabatic(sat_h.family(), params, sat_h.initial_state());
    std::cout << "T=" << io::format_double(traj.total_time)
              << " ground_fidelity=" << io::format_double(
                     sat_h.problem_ground_fidelity(traj.final_state))
              << " steps=" << traj.steps.size() << "\n";

    if (args.step_log) {
        const fs::path dir = out_dir(args);
        Manifest manifest(dir, cfg);
        auto out = open_output(dir / "step_log.csv");
        io::CsvWriter csv(out, cfg.hash(), cfg.get_int("run.seed", 1), io::code_version,
                          {"t", "s", "v", "eps", "rejected_probes"},
                          {"1/J", "1", "J", "J_or_J2", "1"});
        for (const auto& r : traj.steps) csv.row(r.t, r.s, r.v, r.eps, r.probe_count);
        manifest.output(dir / "step_log.csv");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        const CliArgs args = parse_args(argc, argv);
        if (args.command == "lz-scaling") return cmd_lz_scaling(args);
        if (args.command == "sat-scaling") return cmd_sat_scaling(args);
        if (args.command == "zeno-sweep") return cmd_zeno_sweep(args);
        if (args.command == "gen-instances") return cmd_gen_instances(args);
        if (args.command == "solve-instance") return cmd_solve_instance(args);
        usage("unknown subcommand " + args.command);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
