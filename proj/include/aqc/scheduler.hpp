#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqc/hamiltonian_family.hpp"
#include "aqc/observable.hpp"
#include "aqc/propagator.hpp"
#include "aqc/spectrum.hpp"
#include "aqc/state_vector.hpp"
#include "aqc/velocity_profile.hpp"

namespace aqc {

enum class ErrorMeasure { EnergyDiff, QfiDiff };

/// Which state is carried forward after a step is accepted: the more
/// adiabatic v- branch, or a fresh propagation at the accepted mean velocity.
enum class CarryMode { MinusBranch, MeanRepropagate };

/// Multiplicative-increase/multiplicative-decrease realization of the
/// "maximize v such that eps = eps_max" step. A probe is rejected above
/// band_hi * eps_max; below band_lo * eps_max it is accepted and the
/// velocity grown for the next step; in between it is accepted as is.
///
/// The raw per-step law changes v by O(1) factors between neighboring steps.
/// At step sizes short against the gap period those velocity kinks pump the
/// excited state coherently and the feedback loop resonates with its own
/// error signal. run_adiabatic therefore applies the law through a low-pass
/// filter by default: the commanded velocity moves by at most `slew` per
/// step, and the growth rate is recomputed once per `window` accepted steps
/// from the window's mean log error, steering it onto target_fraction *
/// eps_max. Rejections still shrink immediately (by reject_shrink, gentler
/// than shrink_factor so the accepted point lands near the bound, not half
/// a decade under it). window = 0 disables the filter and applies
/// update_velocity verbatim.
struct ControllerParams {
    double grow_factor = 1.5;
    double shrink_factor = 0.5;
    double band_lo = 0.5;
    double band_hi = 1.0;
    int max_probe_iters = 60;
    int window = 150;
    int window_warmup = 20; // first window after a reset; doubles up to `window`
    double filter_gain = 0.25;
    double slew = 1.003;
    // steering well below band_hi leaves headroom for the oscillatory part
    // of the error signal, so its peaks stay under the rejection threshold
    double target_fraction = 0.15;
    double reject_shrink = 0.9;
};

struct AdaptiveParams {
    double eps_max = 1e-6;
    double dt = 0.1;
    double delta = 0.8;
    double v0 = 0.0; // <= 0 selects 0.1 / ||dH/ds|| automatically
    double v_max = 0.0; // sweep-rate ceiling applied to the commanded velocity; <= 0 disables
    ErrorMeasure measure = ErrorMeasure::EnergyDiff;
    ControllerParams controller;
    CarryMode carry = CarryMode::MeanRepropagate;
    SubstepControl substep;
    double steepness = 9.0;

    void validate() const {
        if (eps_max <= 0.0) throw std::invalid_argument("AdaptiveParams: eps_max must be > 0");
        if (dt <= 0.0) throw std::invalid_argument("AdaptiveParams: dt must be > 0");
        if (delta < 0.0 || delta >= 1.0) {
            throw std::invalid_argument("AdaptiveParams: delta must lie in [0,1)");
        }
        if (controller.grow_factor <= 1.0 || controller.shrink_factor <= 0.0 ||
            controller.shrink_factor >= 1.0 || controller.band_lo >= controller.band_hi ||
            controller.band_hi > 1.0) {
            throw std::invalid_argument("AdaptiveParams: bad controller settings");
        }
        if (controller.window < 0 || controller.window_warmup < 1 || controller.slew <= 1.0 ||
            controller.filter_gain <= 0.0 ||
            controller.target_fraction <= 0.0 ||
            controller.target_fraction > controller.band_hi || controller.reject_shrink <= 0.0 ||
            controller.reject_shrink >= 1.0) {
            throw std::invalid_argument("AdaptiveParams: bad controller filter settings");
        }
    }
};

struct StepRecord {
    double t = 0.0; // elapsed physical time after the step
    double s = 0.0; // schedule parameter after the step
    double v = 0.0; // accepted velocity
    double eps = 0.0;
    int probe_count = 0; // rejected probes before acceptance
};

struct Trajectory {
    std::vector<StepRecord> steps;
    StateVector final_state;
    double total_time = 0.0;
    AdaptiveParams params;

    double mean_accepted_eps() const {
        if (steps.empty()) return 0.0;
        double s = 0.0;
        for (const auto& r : steps) s += r.eps;
        return s / static_cast<double>(steps.size());
    }
};

struct ControllerError : std::runtime_error {
    double s, v, eps;
    ControllerError(double s_, double v_, double eps_)
        : std::runtime_error("velocity controller exceeded max_probe_iters at s=" +
                             std::to_string(s_)),
          s(s_), v(v_), eps(eps_) {}
};

/// |<psi+|H|psi+> - <psi-|H|psi->|
inline double error_energy(const StateVector& psi_plus, const StateVector& psi_minus,
                           const Observable& h_at_end) {
    return std::abs(h_at_end.expectation(psi_plus) - h_at_end.expectation(psi_minus));
}

/// |F_Q(psi+) - F_Q(psi-)| with F_Q = 4 Var(H)
inline double error_qfi(const StateVector& psi_plus, const StateVector& psi_minus,
                        const Observable& h_at_end) {
    return std::abs(4.0 * h_at_end.variance(psi_plus) - 4.0 * h_at_end.variance(psi_minus));
}

namespace detail {

inline double measure_error(const HamiltonianFamily& family, double s_end,
                            const StateVector& psi_plus, const StateVector& psi_minus,
                            ErrorMeasure measure) {
    switch (measure) {
        case ErrorMeasure::EnergyDiff:
            return std::abs(family.expectation(s_end, psi_plus) -
                            family.expectation(s_end, psi_minus));
        case ErrorMeasure::QfiDiff:
            return std::abs(family.qfi(s_end, psi_plus) - family.qfi(s_end, psi_minus));
    }
    return 0.0;
}

} // namespace detail

struct ProbeResult {
    StateVector psi_plus;
    StateVector psi_minus;
    double eps = 0.0;
    double ds = 0.0;
    double duration_plus = 0.0;
    double duration_minus = 0.0;
};

/// One two-velocity probe from (s, t, psi): both branches sweep the same
/// ds = v*dt (clamped at s = 1) with erf ramps v_prev -> v(1±delta); the
/// branch durations are chosen so the exact ramp quadrature equals ds, which
/// reduces to the nominal dt/(1±delta) once the ramp endpoints agree.
inline ProbeResult probe_step(const StateVector& psi, const HamiltonianFamily& family, double s,
                              double t, double v_prev, double v, const AdaptiveParams& params) {
    ProbeResult out;
    out.ds = v * params.dt;
    if (s + out.ds > 1.0) out.ds = 1.0 - s;
    const double v_plus = v * (1.0 + params.delta);
    const double v_minus = v * (1.0 - params.delta);
    out.duration_plus = duration_for_displacement(v_prev, v_plus, out.ds);
    out.duration_minus = duration_for_displacement(v_prev, v_minus, out.ds);
    const VelocityProfile prof_plus{v_prev, v_plus, t, out.duration_plus, params.steepness};
    const VelocityProfile prof_minus{v_prev, v_minus, t, out.duration_minus, params.steepness};
    out.psi_plus = propagate_step(psi, family, s, prof_plus, params.substep);
    if (params.delta == 0.0) {
        out.psi_minus = out.psi_plus;
        out.eps = 0.0;
        return out;
    }
    out.psi_minus = propagate_step(psi, family, s, prof_minus, params.substep);
    out.eps = detail::measure_error(family, s + out.ds, out.psi_plus, out.psi_minus, params.measure);
    return out;
}

struct VelocityUpdate {
    double v_new = 0.0;
    bool accept = false;
};

inline VelocityUpdate update_velocity(double v, double eps, const AdaptiveParams& params) {
    if (v <= 0.0) throw std::invalid_argument("update_velocity: v must be > 0");
    const auto& c = params.controller;
    if (eps > c.band_hi * params.eps_max) return {v * c.shrink_factor, false};
    if (eps < c.band_lo * params.eps_max) return {v * c.grow_factor, true};
    return {v, true};
}

/// Called after each accepted step with (t, s, psi); psi may be replaced
/// (Zeno projections hook in here).
using StepCallback = std::function<void(double t, double s, StateVector& psi)>;

/// The full feedback loop: probe with v(1±delta), compare, adapt v, repeat
/// until s = 1. Rejected probes cost no physical time; T sums accepted step
/// durations only.
inline Trajectory run_adiabatic(const HamiltonianFamily& family, const AdaptiveParams& params,
                                std::optional<StateVector> initial = std::nullopt,
                                const StepCallback& on_step = {}) {
    params.validate();
    Trajectory traj;
    traj.params = params;

    StateVector psi = initial ? std::move(*initial) : ground_state(family.at(0.0)).state;
    double v = params.v0 > 0.0
                   ? params.v0
                   : 0.1 / std::max(family.deriv_norm_bound(), 1e-12);
    double v_prev = v;
    double s = 0.0;
    double t = 0.0;

    const auto& ctl = params.controller;
    const bool filtered = ctl.window > 0;
    // the filtered rejection factor is gentler, so the iteration cap scales
    // to cover the same velocity range as shrink_factor^max_probe_iters
    const int reject_cap =
        filtered ? static_cast<int>(std::ceil(ctl.max_probe_iters * std::log(ctl.shrink_factor) /
                                              std::log(ctl.reject_shrink)))
                 : ctl.max_probe_iters;
    const double log_target = std::log(ctl.target_fraction * params.eps_max);
    double f_step = 1.0; // per-step velocity growth commanded by the filter
    bool fed_back = false; // set at the first rejection; arms the v_max ceiling
    double win_log_sum = 0.0;
    int win_count = 0;
    int win_size = std::min(ctl.window_warmup, std::max(ctl.window, 1));

    while (s < 1.0) {
        int rejects = 0;
        ProbeResult probe;
        VelocityUpdate upd;
        for (;;) {
            probe = probe_step(psi, family, s, t, v_prev, v, params);
            upd = update_velocity(v, probe.eps, params);
            if (upd.accept) break;
            if (filtered) {
                v *= ctl.reject_shrink;
                f_step = 1.0;
                win_log_sum = 0.0;
                win_count = 0;
                win_size = std::min(ctl.window_warmup, ctl.window);
            } else {
                v = upd.v_new;
            }
            fed_back = true;
            if (++rejects > reject_cap) {
                throw ControllerError(s, v, probe.eps);
            }
        }

        const double s_end = (s + v * params.dt >= 1.0) ? 1.0 : s + probe.ds;
        if (params.carry == CarryMode::MinusBranch) {
            psi = std::move(probe.psi_minus);
            t += probe.duration_minus;
            traj.steps.push_back({t, s_end, v, probe.eps, rejects});
            v_prev = v * (1.0 - params.delta);
        } else {
            const double dur = duration_for_displacement(v_prev, v, probe.ds);
            const VelocityProfile prof{v_prev, v, t, dur, params.steepness};
            psi = propagate_step(psi, family, s, prof, params.substep);
            t += dur;
            traj.steps.push_back({t, s_end, v, probe.eps, rejects});
            v_prev = v;
        }
        s = s_end;
        if (on_step) on_step(t, s, psi);

        if (filtered) {
            win_log_sum += std::log(std::max(probe.eps, 1e-300));
            if (++win_count == win_size) {
                double f_total = std::exp(ctl.filter_gain * (log_target - win_log_sum / win_size));
                f_total = std::min(4.0, std::max(0.25, f_total));
                f_step = std::pow(f_total, 1.0 / win_size);
                // constant slew allowance per window, so warmup windows may
                // correct at the same total rate as full ones
                const double cap = std::pow(ctl.slew, static_cast<double>(ctl.window) / win_size);
                f_step = std::min(cap, std::max(1.0 / cap, f_step));
                win_log_sum = 0.0;
                win_count = 0;
                win_size = std::min(2 * win_size, ctl.window);
            }
            v *= f_step;
        } else {
            v = upd.v_new;
        }
        // the ceiling arms at the first rejection: the opening run-in from v0
        // must stay untouched or the excitation it injects never appears
        if (fed_back && params.v_max > 0.0 && v > params.v_max) v = params.v_max;
    }

    traj.final_state = std::move(psi);
    traj.total_time = t;
    return traj;
}

} // namespace aqc
