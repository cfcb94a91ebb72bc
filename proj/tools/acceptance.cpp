// Acceptance sweep: runs the scaling, ensemble and measurement-interleaving
// studies at their reference settings and prints one PASS/FAIL line per
// criterion. Exit code is the number of failed criteria.
//
// Usage: acceptance [--only lz,sat,zeno,properties]
//
// The avoided-crossing and Zeno sections finish in tens of minutes on one
// core; the instance-ensemble section sweeps 800 hard instances up to 12
// variables and runs for hours.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aqc/experiments.hpp"

using namespace aqc;
using namespace aqc::experiments;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    if (!ok) ++failures;
    std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

struct MeasureSummary {
    double b = 0.0, a = 0.0;
    double res_span = 0.0; // decades
    double t_decades = 0.0, infid_decades = 0.0;
    bool fit_ok = false;
};

MeasureSummary summarize(const LzScalingResult& res, ErrorMeasure m) {
    MeasureSummary out;
    const auto& fit = m == ErrorMeasure::EnergyDiff ? res.fit_energy : res.fit_qfi;
    if (!fit) return out;
    out.fit_ok = true;
    out.a = fit->params[0];
    out.b = fit->params[1];
    double rmin = 1e300, rmax = -1e300;
    for (double r : fit->residuals) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    out.res_span = (rmax - rmin) / std::log(10.0);
    double tmin = 1e300, tmax = 0, fmin = 1e300, fmax = 0;
    for (const auto& row : res.rows) {
        if (row.measure != m || !row.error.empty() || row.infidelity <= 0.0) continue;
        tmin = std::min(tmin, row.total_time);
        tmax = std::max(tmax, row.total_time);
        fmin = std::min(fmin, row.infidelity);
        fmax = std::max(fmax, row.infidelity);
    }
    out.t_decades = std::log10(tmax / tmin);
    out.infid_decades = std::log10(fmax / fmin);
    return out;
}

void run_lz_section() {
    std::cerr << "running avoided-crossing scaling grid...\n";
    const auto res = run_lz_scaling(LzScalingConfig{});
    const auto e = summarize(res, ErrorMeasure::EnergyDiff);
    const auto q = summarize(res, ErrorMeasure::QfiDiff);

    const bool b_ok = e.fit_ok && q.fit_ok && e.b >= -2.25 && e.b <= -1.85 && q.b >= -2.25 &&
                      q.b <= -1.85 && e.a > q.a;
    report(b_ok, "power_law_exponents",
           "b_energy=" + fmt(e.b) + " b_qfi=" + fmt(q.b) + " (band [-2.25,-1.85]), a_energy=" +
               fmt(e.a) + " > a_qfi=" + fmt(q.a));

    const bool collapse_ok = e.fit_ok && q.fit_ok && e.res_span < 0.5 && q.res_span < 0.5 &&
                             e.t_decades >= 2.0 && q.t_decades >= 2.0 && e.infid_decades >= 4.0 &&
                             q.infid_decades >= 4.0;
    report(collapse_ok, "data_collapse",
           "residual span energy=" + fmt(e.res_span) + " qfi=" + fmt(q.res_span) +
               " decades (< 0.5) over T decades " + fmt(e.t_decades) + "/" + fmt(q.t_decades) +
               " (>= 2) and infidelity decades " + fmt(e.infid_decades) + "/" +
               fmt(q.infid_decades) + " (>= 4)");

    int total = 0, within = 0;
    for (const auto& row : res.rows) {
        if (row.measure != ErrorMeasure::QfiDiff || !row.error.empty()) continue;
        ++total;
        const double predicted = row.mean_accepted_eps / (4.0 * row.dt * row.dt);
        const double ratio = row.infidelity / predicted;
        if (ratio >= 1.0 / 3.0 && ratio <= 3.0) ++within;
    }
    const double frac = total > 0 ? static_cast<double>(within) / total : 0.0;
    report(frac >= 0.8, "error_budget_consistency",
           fmt(100.0 * frac) + "% of QFI-measure points within a factor 3 of the predicted "
                               "budget (>= 80%)");
}

void run_sat_section() {
    std::cerr << "running instance-ensemble scaling (hours)...\n";
    SatScalingConfig cfg;
    const auto res =
        run_sat_scaling(cfg, [](const std::string& msg) { std::cerr << "  " << msg << "\n"; });

    const bool fits_ok = res.fit_quadratic && res.fit_exponential;
    const double r2_quad = fits_ok ? res.fit_quadratic->adjusted_r2 : 0.0;
    const double r2_exp = fits_ok ? res.fit_exponential->adjusted_r2 : 0.0;
    report(fits_ok && res.failed_runs == 0 && r2_quad > r2_exp, "ensemble_scaling_shape",
           "adjusted R^2 quadratic=" + fmt(r2_quad) + " > exponential=" + fmt(r2_exp) +
               ", failed runs=" + std::to_string(res.failed_runs));

    int checked = 0, fid_ok = 0;
    double worst = 1.0;
    for (const auto& row : res.rows) {
        if (row.n > 10 || !row.error.empty()) continue;
        ++checked;
        worst = std::min(worst, row.ground_fidelity);
        if (row.ground_fidelity >= 0.99) ++fid_ok;
    }
    // satisfiable instances only by construction (hard-set filter); the
    // penalty ground-energy equivalence is cross-checked on a fresh sample
    // with both verdicts represented
    int equiv_checked = 0, equiv_ok = 0;
    bool saw_sat = false, saw_unsat = false;
    for (int k = 0; k < 40; ++k) {
        const auto inst = models::generate_instance(5 + k % 4, 4.4, 9000 + k);
        const auto ham = models::sat_hamiltonians(inst);
        double ground = 1e300;
        for (double d : ham.h_p.diagonal()) ground = std::min(ground, d);
        bool brute_sat = false;
        for (std::uint64_t a = 0; a < (1ull << inst.n_vars) && !brute_sat; ++a) {
            bool all = true;
            for (const auto& c : inst.clauses) {
                bool sat = false;
                for (const auto& l : c) {
                    sat |= (((a >> (l.var - 1)) & 1) == (l.negated ? 0u : 1u));
                }
                if (!sat) {
                    all = false;
                    break;
                }
            }
            brute_sat = all;
        }
        const bool dpll_sat = models::dpll_solve(inst).satisfiable;
        (dpll_sat ? saw_sat : saw_unsat) = true;
        ++equiv_checked;
        if ((ground == 0.0) == dpll_sat && dpll_sat == brute_sat) ++equiv_ok;
    }
    report(checked > 0 && fid_ok == checked && equiv_ok == equiv_checked && saw_sat && saw_unsat,
           "instance_correctness",
           std::to_string(fid_ok) + "/" + std::to_string(checked) +
               " runs (n <= 10) reach ground fidelity >= 0.99 (worst " + fmt(worst) + "); " +
               std::to_string(equiv_ok) + "/" + std::to_string(equiv_checked) +
               " instances satisfy ground-energy-zero == DPLL == brute-force");
}

void run_zeno_section() {
    std::cerr << "running measurement-interleaving pair...\n";
    const ZenoPairConfig cfg;
    const auto pair = run_zeno_pair(models::lz_family(), cfg);

    const bool t_fast_ok = std::abs(pair.fast.plain_total_time - cfg.target_t_fast) <=
                           0.2 * cfg.target_t_fast;
    const bool t_slow_ok = std::abs(pair.slow.plain_total_time - cfg.target_t_slow) <=
                           0.2 * cfg.target_t_slow;

    double best_gain = 0.0, best_fail = 1.0, best_frac = 0.0;
    for (const auto& row : pair.fast.rows) {
        if (row.t_z_over_t < 0.01 || row.t_z_over_t > 0.1 || row.failure_prob > 0.1) continue;
        const double gain = pair.fast.plain_infidelity / row.infidelity;
        if (gain > best_gain) {
            best_gain = gain;
            best_fail = row.failure_prob;
            best_frac = row.t_z_over_t;
        }
    }
    report(t_fast_ok && best_gain >= 100.0, "zeno_nonadiabatic_gain",
           "plain T=" + fmt(pair.fast.plain_total_time) + " (target " + fmt(cfg.target_t_fast) +
               " +-20%), best infidelity gain " + fmt(best_gain) + "x at t_z/T=" + fmt(best_frac) +
               " with failure " + fmt(best_fail) + " (need >= 100x, failure <= 0.1)");

    // matched grid point closest to t_z/T = 0.1
    double fail_fast = 0.0, fail_slow = 0.0, at = 0.0, dist = 1e300;
    for (std::size_t i = 0; i < pair.fast.rows.size() && i < pair.slow.rows.size(); ++i) {
        const double d = std::abs(std::log10(pair.fast.rows[i].t_z_over_t / 0.1));
        if (d < dist) {
            dist = d;
            at = pair.fast.rows[i].t_z_over_t;
            fail_fast = pair.fast.rows[i].failure_prob;
            fail_slow = pair.slow.rows[i].failure_prob;
        }
    }
    report(t_slow_ok && fail_slow > fail_fast, "zeno_adiabatic_failure_crossover",
           "plain T=" + fmt(pair.slow.plain_total_time) + " (target " + fmt(cfg.target_t_slow) +
               " +-20%), at t_z/T=" + fmt(at) + " failure adiabatic=" + fmt(fail_slow) +
               " > nonadiabatic=" + fmt(fail_fast));
}

void run_properties_section() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string why;
    auto fail = [&](const std::string& msg) {
        if (ok) why = msg;
        ok = false;
    };

    // norm conservation and per-step budget on a live trajectory
    const HamiltonianFamily fam = models::lz_family();
    AdaptiveParams p;
    p.eps_max = 1e-6;
    p.dt = 0.1;
    p.delta = 0.8;
    const auto traj = run_adiabatic(fam, p, std::nullopt, [&](double, double, StateVector& psi) {
        if (std::abs(psi.norm() - 1.0) > 1e-10) fail("norm drift on an accepted step");
    });
    for (const auto& r : traj.steps) {
        if (r.eps > p.eps_max) fail("accepted step above the error budget");
    }

    // zero probe separation and a schedule-independent Hamiltonian both
    // produce a vanishing error signal
    const StateVector psi0 = ground_state(fam.at(0.0)).state;
    AdaptiveParams pz = p;
    pz.delta = 0.0;
    if (probe_step(psi0, fam, 0.2, 0.0, 0.5, 0.5, pz).eps != 0.0) {
        fail("delta = 0 gave a nonzero error signal");
    }
    Observable x(1, {{1.0, "X"}});
    const HamiltonianFamily constant({{x, 1.0, 0.0}});
    const StateVector cpsi = ground_state(constant.at(0.0)).state;
    if (probe_step(cpsi, constant, 0.2, 0.0, 0.5, 0.5, p).eps > 1e-12) {
        fail("constant Hamiltonian gave a nonzero error signal");
    }

    // byte-identical reruns
    LzScalingConfig tiny;
    tiny.dt_grid = {0.1};
    tiny.eps_grid = logspace(1e-6, 1e-5, 3);
    std::ostringstream s1, s2;
    write_lz_scaling_csv(run_lz_scaling(tiny), tiny.delta, s1, "h", 1);
    write_lz_scaling_csv(run_lz_scaling(tiny), tiny.delta, s2, "h", 1);
    if (s1.str() != s2.str()) fail("rerun CSVs differ");

    // DPLL against brute force on 100 instances
    for (int k = 0; k < 100; ++k) {
        const auto inst = models::generate_instance(4 + k % 6, 4.4, 100 + k);
        bool brute = false;
        for (std::uint64_t a = 0; a < (1ull << inst.n_vars) && !brute; ++a) {
            bool all = true;
            for (const auto& c : inst.clauses) {
                bool sat = false;
                for (const auto& l : c) {
                    sat |= (((a >> (l.var - 1)) & 1) == (l.negated ? 0u : 1u));
                }
                if (!sat) {
                    all = false;
                    break;
                }
            }
            brute = all;
        }
        if (models::dpll_solve(inst).satisfiable != brute) fail("DPLL disagrees with brute force");
    }

    // penalty diagonal equals brute-force violation counts
    for (int k = 0; k < 6; ++k) {
        const auto inst = models::generate_instance(5 + k % 4, 4.4, 300 + k);
        const auto ham = models::sat_hamiltonians(inst);
        const auto& diag = ham.h_p.diagonal();
        for (std::uint64_t a = 0; a < diag.size(); ++a) {
            int violated = 0;
            for (const auto& c : inst.clauses) {
                bool sat = false;
                for (const auto& l : c) {
                    sat |= (((a >> (l.var - 1)) & 1) == (l.negated ? 0u : 1u));
                }
                if (!sat) ++violated;
            }
            if (std::abs(diag[a] - violated) > 1e-10) fail("penalty diagonal mismatch");
        }
    }

    // exact synthetic power law recovered to 1e-12
    std::vector<analysis::Point> pts;
    for (int i = 0; i < 8; ++i) {
        const double x = std::pow(10.0, 1.0 + 0.5 * i);
        pts.push_back({x, 0.76 * std::pow(x, -2.05)});
    }
    const auto fit = analysis::fit_power_law(pts);
    if (std::abs(fit.params[0] - 0.76) > 1e-12 || std::abs(fit.params[1] + 2.05) > 1e-12) {
        fail("power-law fit recovery above 1e-12");
    }

    // DIMACS round trip on 50 instances
    for (int k = 0; k < 50; ++k) {
        const auto inst = models::generate_instance(5 + k % 8, 4.4, 700 + k);
        if (!(models::parse_dimacs(models::emit_dimacs(inst)) == inst)) {
            fail("DIMACS round trip changed the instance");
        }
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
    if (secs >= 60.0) fail("property block exceeded one minute");
    report(ok, "property_suite", ok ? "all invariants hold in " + fmt(secs) + "s" : why);
}

} // namespace

int main(int argc, char** argv) {
    std::set<std::string> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string part;
            while (std::getline(ss, part, ',')) only.insert(part);
        } else {
            std::cerr << "usage: acceptance [--only lz,sat,zeno,properties]\n";
            return 2;
        }
    }
    auto wanted = [&](const char* s) { return only.empty() || only.count(s) > 0; };
    if (wanted("lz")) run_lz_section();
    if (wanted("sat")) run_sat_section();
    if (wanted("zeno")) run_zeno_section();
    if (wanted("properties")) run_properties_section();
    return failures;
}
