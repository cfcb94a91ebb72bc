#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "aqc/analysis.hpp"
#include "aqc/io/config.hpp"
#include "aqc/io/csv.hpp"
#include "aqc/io/format.hpp"
#include "aqc/models/lz.hpp"
#include "aqc/models/sat.hpp"
#include "aqc/scheduler.hpp"
#include "aqc/spectrum.hpp"
#include "aqc/zeno.hpp"

namespace aqc::experiments {

inline std::vector<double> logspace(double lo, double hi, int count) {
    std::vector<double> out;
    if (count == 1) return {lo};
    const double llo = std::log10(lo), lhi = std::log10(hi);
    for (int i = 0; i < count; ++i) {
        out.push_back(std::pow(10.0, llo + (lhi - llo) * i / (count - 1)));
    }
    return out;
}

/// Deterministic parallel map: task i writes slot i, so parallel and serial
/// execution produce identical row sets.
inline void parallel_for(std::size_t n_tasks, int parallelism,
                         const std::function<void(std::size_t)>& fn) {
    if (parallelism <= 1 || n_tasks <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<std::size_t>(parallelism, n_tasks);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// LZ infidelity-vs-time scaling
// ---------------------------------------------------------------------------

struct LzScalingConfig {
    std::vector<double> dt_grid{0.1, 0.07, 0.05, 0.03};
    std::vector<double> eps_grid = logspace(1e-10, 5e-5, 8);
    double delta = 0.8;
    std::vector<ErrorMeasure> measures{ErrorMeasure::EnergyDiff, ErrorMeasure::QfiDiff};
    // start velocity v0 = c * sqrt(eps_max) / dt: the sudden turn-on at v0
    // deposits excitation ~ v0 that the differential probe cannot see, and
    // this scaling keeps that deposit on the same power law as the rest of
    // the error budget; c <= 0 falls back to the scheduler default
    double v0c_energy = 4.7;
    double v0c_qfi = 1.0;
    // controller filter window measured in physical step time: at small dt
    // a fixed step-count window falls under the gap period, the windowed
    // mean aliases the excitation beat and the filter slowly damps the
    // start-up excitation it is supposed to preserve
    double window_time = 15.0;
    std::uint64_t seed = 1;
    int parallelism = 1;
    SubstepControl substep;

    double v0_for(ErrorMeasure m, double eps_max, double dt) const {
        const double c = m == ErrorMeasure::EnergyDiff ? v0c_energy : v0c_qfi;
        return c > 0.0 ? c * std::sqrt(eps_max) / dt : 0.0;
    }
};

struct LzScalingRow {
    ErrorMeasure measure;
    double dt = 0.0;
    double eps_max = 0.0;
    double total_time = 0.0;
    double infidelity = 0.0;
    double mean_accepted_eps = 0.0;
    int steps = 0;
    std::string error; // non-empty when the run failed
};

struct LzScalingResult {
    std::vector<LzScalingRow> rows;
    std::optional<analysis::FitResult> fit_energy;
    std::optional<analysis::FitResult> fit_qfi;
};

inline const char* measure_name(ErrorMeasure m) {
    return m == ErrorMeasure::EnergyDiff ? "energy" : "qfi";
}

inline LzScalingResult run_lz_scaling(const LzScalingConfig& cfg) {
    const HamiltonianFamily family = models::lz_family();
    const auto final_space = ground_space(family.at(1.0));
    const StateVector initial = ground_state(family.at(0.0)).state;

    struct Task {
        ErrorMeasure measure;
        double dt, eps_max;
    };
    std::vector<Task> tasks;
    for (ErrorMeasure m : cfg.measures) {
        for (double dt : cfg.dt_grid) {
            for (double eps : cfg.eps_grid) tasks.push_back({m, dt, eps});
        }
    }

    LzScalingResult result;
    result.rows.resize(tasks.size());
    parallel_for(tasks.size(), cfg.parallelism, [&](std::size_t i) {
        const Task& task = tasks[i];
        LzScalingRow row;
        row.measure = task.measure;
        row.dt = task.dt;
        row.eps_max = task.eps_max;
        try {
            AdaptiveParams params;
            params.eps_max = task.eps_max;
            params.dt = task.dt;
            params.delta = cfg.delta;
            params.measure = task.measure;
            params.v0 = cfg.v0_for(task.measure, task.eps_max, task.dt);
            if (cfg.window_time > 0.0) {
                params.controller.window =
                    static_cast<int>(std::lround(cfg.window_time / task.dt));
            }
            params.substep = cfg.substep;
            Trajectory traj = run_adiabatic(family, params, initial);
            row.total_time = traj.total_time;
            row.infidelity = 1.0 - subspace_fidelity(traj.final_state, final_space);
            row.mean_accepted_eps = traj.mean_accepted_eps();
            row.steps = static_cast<int>(traj.steps.size());
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        result.rows[i] = std::move(row);
    });

    for (ErrorMeasure m : cfg.measures) {
        std::vector<analysis::Point> pts;
        for (const auto& row : result.rows) {
            if (row.measure == m && row.error.empty() && row.infidelity > 0.0) {
                pts.push_back({row.total_time, row.infidelity});
            }
        }
        if (pts.size() >= 3) {
            auto fit = analysis::fit_power_law(pts);
            (m == ErrorMeasure::EnergyDiff ? result.fit_energy : result.fit_qfi) = fit;
        }
    }
    return result;
}

inline void write_lz_scaling_csv(const LzScalingResult& result, double delta, std::ostream& out,
                                 const std::string& config_hash, std::uint64_t seed) {
    io::CsvWriter csv(out, config_hash, seed, io::code_version,
                      {"T", "infidelity", "measure", "dt", "eps_max", "delta", "mean_eps", "steps",
                       "error"},
                      {"1/J", "1", "-", "1/J", "J_or_J2", "1", "J_or_J2", "1", "-"});
    // delta is constant per config; repeated per row for self-contained files
    for (const auto& r : result.rows) {
        csv.row(r.total_time, r.infidelity, measure_name(r.measure), r.dt, r.eps_max, delta,
                r.mean_accepted_eps, r.steps, r.error.empty() ? "ok" : r.error);
    }
}

// ---------------------------------------------------------------------------
// 3-SAT running-time scaling
// ---------------------------------------------------------------------------

struct SatScalingConfig {
    int n_min = 5;
    int n_max = 12;
    int generated_per_n = 1000;
    int hard_per_n = 100;
    double alpha = 4.4;
    double eps_max = 3.4e-6;
    double dt = 0.1;
    double delta = 0.5;
    ErrorMeasure measure = ErrorMeasure::EnergyDiff;
    models::HardFilter filter = models::HardFilter::SatisfiableOnly;
    models::BeginField begin_field = models::BeginField::Farhi;
    std::uint64_t seed = 1;
    int parallelism = 1;
    // loose integrator budget: the per-step halving check keeps the true
    // error well under it, and at 3.4e-6 tolerance the run cost drops 6x
    SubstepControl substep{1e-6, 2, 10};
};

struct SatInstanceRow {
    int n = 0;
    int index = 0; // rank within the hard set
    std::uint64_t seed = 0;
    std::uint64_t dpll_iterations = 0;
    double total_time = 0.0;
    double ground_fidelity = 0.0;
    int steps = 0;
    std::string error;
};

struct SatScalingResult {
    std::vector<SatInstanceRow> rows;
    std::vector<std::pair<int, analysis::EnsembleStats>> stats_per_n;
    std::optional<analysis::FitResult> fit_linear, fit_quadratic, fit_exponential;
    int failed_runs = 0;
};

/// Generate the ensemble for one n and keep the classically hardest subset.
inline std::vector<models::SatInstance> hard_ensemble(int n, const SatScalingConfig& cfg) {
    std::vector<models::SatInstance> instances;
    std::vector<models::DpllResult> solved;
    for (int i = 0; i < cfg.generated_per_n; ++i) {
        const std::uint64_t s = io::derive_seed(cfg.seed, static_cast<std::uint64_t>(n) * 1000003 + i);
        instances.push_back(models::generate_instance(n, cfg.alpha, s));
        solved.push_back(models::dpll_solve(instances.back()));
    }
    return models::select_hard_instances(instances, cfg.hard_per_n, cfg.filter, &solved);
}

inline SatScalingResult run_sat_scaling(const SatScalingConfig& cfg,
                                        const std::function<void(const std::string&)>& progress =
                                            {}) {
    SatScalingResult result;
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
        if (progress) progress("n=" + std::to_string(n) + ": selecting hard instances");
        const auto hard = hard_ensemble(n, cfg);
        std::vector<SatInstanceRow> rows(hard.size());
        parallel_for(hard.size(), cfg.parallelism, [&](std::size_t i) {
            SatInstanceRow row;
            row.n = n;
            row.index = static_cast<int>(i);
            row.seed = hard[i].seed;
            row.dpll_iterations = models::dpll_solve(hard[i]).iterations;
            try {
                const auto sat_h = models::sat_hamiltonians(hard[i], cfg.begin_field);
                const HamiltonianFamily family = sat_h.family();
                AdaptiveParams params;
                params.eps_max = cfg.eps_max;
                params.dt = cfg.dt;
                params.delta = cfg.delta;
                params.measure = cfg.measure;
                params.substep = cfg.substep;
                Trajectory traj = run_adiabatic(family, params, sat_h.initial_state());
                row.total_time = traj.total_time;
                row.ground_fidelity = sat_h.problem_ground_fidelity(traj.final_state);
                row.steps = static_cast<int>(traj.steps.size());
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows[i] = std::move(row);
        });
        std::vector<double> times;
        for (auto& row : rows) {
            if (row.error.empty()) {
                times.push_back(row.total_time);
            } else {
                ++result.failed_runs;
            }
            result.rows.push_back(std::move(row));
        }
        if (!times.empty()) {
            result.stats_per_n.emplace_back(n, analysis::ensemble_stats(times));
        }
        if (progress && !times.empty()) {
            progress("n=" + std::to_string(n) +
                     ": mean T = " + io::format_double(result.stats_per_n.back().second.mean_t));
        }
    }

    std::vector<analysis::Point> mean_pts;
    for (const auto& [n, st] : result.stats_per_n) {
        mean_pts.push_back({static_cast<double>(n), st.mean_t});
    }
    if (mean_pts.size() >= 5) {
        result.fit_linear = analysis::fit_model(mean_pts, analysis::FitModel::Linear);
        result.fit_quadratic = analysis::fit_model(mean_pts, analysis::FitModel::Quadratic);
        result.fit_exponential = analysis::fit_model(mean_pts, analysis::FitModel::Exponential);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Zeno sweep
// ---------------------------------------------------------------------------

struct ZenoSweepConfig {
    AdaptiveParams base;
    std::vector<double> t_z_over_t_grid; // measurement interval as a fraction of the plain-run T
    std::uint64_t seed = 1;
};

struct ZenoSweepResult {
    double plain_total_time = 0.0;
    double plain_infidelity = 0.0;
    std::vector<ZenoSweepRow> rows;
};

inline ZenoSweepResult run_zeno_sweep(const HamiltonianFamily& family, const ZenoSweepConfig& cfg,
                                      std::optional<StateVector> initial = std::nullopt) {
    ZenoSweepResult result;
    Trajectory plain = run_adiabatic(family, cfg.base, initial);
    result.plain_total_time = plain.total_time;
    result.plain_infidelity =
        1.0 - subspace_fidelity(plain.final_state, ground_space(family.at(1.0)));
    std::vector<double> t_z_grid;
    for (double f : cfg.t_z_over_t_grid) t_z_grid.push_back(f * plain.total_time);
    result.rows = zeno_sweep(family, cfg.base, t_z_grid, initial);
    return result;
}

/// Paired fast/slow demonstration sweep. Each base is calibrated (bisection
/// on eps_max) onto a target plain-run total time. Start velocities are per
/// base: the fast base uses the sudden-start scaling v0 = c * sqrt(eps)/dt,
/// the slow base a fixed v0, chosen so both carry a visible initial
/// excitation. With these defaults the fast base gains over two decades of
/// final fidelity from measurements at t_z/T ~ 0.01-0.1, while the slow
/// base's cumulative failure probability stays above the fast base's near
/// t_z/T ~ 0.1.
struct ZenoPairConfig {
    double dt = 0.1;
    double delta = 0.8;
    ErrorMeasure measure = ErrorMeasure::EnergyDiff;
    double target_t_fast = 12.2;
    double target_t_slow = 99.2;
    double eps_fast = 0.0; // <= 0 calibrates onto the target time
    double eps_slow = 0.0;
    double v0c_fast = 1.2;
    double v0_fast = 0.0; // used when v0c_fast <= 0
    double v0c_slow = 0.0;
    double v0_slow = 2.0;
    std::vector<double> t_z_over_t_grid = logspace(0.003, 0.3, 11);
    std::uint64_t seed = 1;

    AdaptiveParams base_params(bool fast, double eps) const {
        AdaptiveParams p;
        p.eps_max = eps;
        p.dt = dt;
        p.delta = delta;
        p.measure = measure;
        const double c = fast ? v0c_fast : v0c_slow;
        p.v0 = c > 0.0 ? c * std::sqrt(eps) / dt : (fast ? v0_fast : v0_slow);
        return p;
    }
};

struct ZenoPairResult {
    ZenoSweepResult fast, slow;
    double eps_fast = 0.0, eps_slow = 0.0;
};

inline double calibrate_eps_for_total_time(const HamiltonianFamily& family,
                                           const std::function<AdaptiveParams(double)>& make_params,
                                           double target_t, double rel_tol, double log10_lo,
                                           double log10_hi);

inline ZenoPairResult run_zeno_pair(const HamiltonianFamily& family, const ZenoPairConfig& cfg) {
    ZenoPairResult out;
    for (bool fast : {true, false}) {
        auto make = [&](double eps) { return cfg.base_params(fast, eps); };
        const double eps_override = fast ? cfg.eps_fast : cfg.eps_slow;
        const double target = fast ? cfg.target_t_fast : cfg.target_t_slow;
        const double eps = eps_override > 0.0
                               ? eps_override
                               : calibrate_eps_for_total_time(family, make, target, 0.05, -12.0,
                                                              -2.0);
        ZenoSweepConfig sweep;
        sweep.base = make(eps);
        sweep.t_z_over_t_grid = cfg.t_z_over_t_grid;
        sweep.seed = cfg.seed;
        (fast ? out.fast : out.slow) = run_zeno_sweep(family, sweep);
        (fast ? out.eps_fast : out.eps_slow) = eps;
    }
    return out;
}

/// Bisection on log10(eps_max) so the plain adaptive run lands on a target
/// total time (the knob T depends on monotonically). The builder maps a
/// candidate eps_max to the full parameter set, so conventions where other
/// knobs track eps_max (e.g. v0 ~ sqrt(eps_max)) calibrate correctly.
inline double calibrate_eps_for_total_time(const HamiltonianFamily& family,
                                           const std::function<AdaptiveParams(double)>& make_params,
                                           double target_t, double rel_tol = 0.05,
                                           double log10_lo = -12.0, double log10_hi = -2.0) {
    auto total_time = [&](double log_eps) {
        return run_adiabatic(family, make_params(std::pow(10.0, log_eps))).total_time;
    };
    double lo = log10_lo, hi = log10_hi;
    // T is decreasing in eps_max: lo -> long runs, hi -> short runs
    for (int iter = 0; iter < 40; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double t = total_time(mid);
        if (std::abs(t - target_t) <= rel_tol * target_t) return std::pow(10.0, mid);
        if (t > target_t) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw std::runtime_error("calibrate_eps_for_total_time: bisection failed");
}

inline double calibrate_eps_for_total_time(const HamiltonianFamily& family, AdaptiveParams base,
                                           double target_t, double rel_tol = 0.05,
                                           double log10_lo = -12.0, double log10_hi = -2.0) {
    return calibrate_eps_for_total_time(
        family,
        [&](double eps) {
            base.eps_max = eps;
            return base;
        },
        target_t, rel_tol, log10_lo, log10_hi);
}

} // namespace aqc::experiments
