#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "aqc/hamiltonian_family.hpp"
#include "aqc/krylov.hpp"
#include "aqc/state_vector.hpp"
#include "aqc/velocity_profile.hpp"

namespace aqc {

struct SubstepControl {
    double budget = 1e-12;   // accepted ||psi_N - psi_2N|| per step
    int initial_divisor = 20; // first try: duration / initial_divisor substeps
    int max_doublings = 10;
};

struct PropagationError : std::runtime_error {
    double achieved;
    PropagationError(const std::string& what, double err)
        : std::runtime_error(what), achieved(err) {}
};

namespace detail {

/// Fourth-order commutator-free exponential integrator (two Gauss-point
/// exponentials per substep). For an s-affine family each factor collapses to
/// a plain exp(-i (tau/2) H(s_eff)), so a substep costs two Krylov
/// exponentials of half length.
inline StateVector propagate_fixed(const StateVector& psi, const HamiltonianFamily& family,
                                   double s0, const VelocityProfile& profile, int substeps,
                                   double krylov_tol) {
    static const double gauss_off = std::sqrt(3.0) / 6.0;
    static const double x1 = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0;
    static const double x2 = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;
    StateVector cur = psi;
    const double tau = profile.duration / substeps;
    for (int i = 0; i < substeps; ++i) {
        const double t_mid = profile.t_start + (i + 0.5) * tau;
        const double s1 = s0 + profile.displacement_to(t_mid - gauss_off * tau);
        const double s2 = s0 + profile.displacement_to(t_mid + gauss_off * tau);
        // x1 H(s1) + x2 H(s2) = (1/2) H(2 x1 s1 + 2 x2 s2) by affinity in s
        const double s_first = 2.0 * (x2 * s1 + x1 * s2);
        const double s_second = 2.0 * (x1 * s1 + x2 * s2);
        for (double s_eff : {s_first, s_second}) {
            auto apply_h = [&](const StateVector& in, StateVector& out) {
                family.apply_add(s_eff, in, out);
            };
            cur = expm_krylov(apply_h, 0.5 * tau, cur, krylov_tol);
        }
    }
    return cur;
}

inline double l2_diff(const StateVector& a, const StateVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

} // namespace detail

/// Solve i d|psi>/dt = H(s(t))|psi> across one step window, with
/// s(t) = s0 + integral of the erf velocity profile. Exponential midpoint:
/// H is frozen at s(t_mid) per substep and applied as a Krylov matrix
/// exponential. Substeps are doubled until the step-halving error estimate
/// drops below the accuracy budget.
inline StateVector propagate_step(const StateVector& psi, const HamiltonianFamily& family,
                                  double s0, const VelocityProfile& profile,
                                  const SubstepControl& control = {}) {
    if (psi.n_qubits() != family.n_qubits()) {
        throw std::invalid_argument("propagate_step: dimension mismatch");
    }
    if (profile.duration == 0.0) return psi;
    if (profile.duration < 0.0) throw std::invalid_argument("propagate_step: negative duration");

    int n_sub = std::max(1, control.initial_divisor);
    auto tol_for = [&](int n) { return std::clamp(control.budget * 0.01 / n, 1e-15, 1e-13); };

    StateVector coarse = detail::propagate_fixed(psi, family, s0, profile, n_sub, tol_for(n_sub));
    double err = 0.0;
    for (int d = 0; d < control.max_doublings; ++d) {
        const int n_fine = 2 * n_sub;
        StateVector fine = detail::propagate_fixed(psi, family, s0, profile, n_fine, tol_for(n_fine));
        err = detail::l2_diff(coarse, fine);
        if (err <= control.budget) return fine;
        coarse = std::move(fine);
        n_sub = n_fine;
    }
    throw PropagationError("propagate_step: accuracy budget not met", err);
}

/// Fine-step reference oracle: piecewise-constant-Hamiltonian midpoint
/// exponential over an explicit s(t) with a fixed substep count. Each substep
/// is unitary up to the Krylov tolerance.
inline StateVector evolve_reference(const StateVector& psi, const HamiltonianFamily& family,
                                    const std::function<double(double)>& s_of_t, double t0,
                                    double t1, int substeps) {
    if (psi.n_qubits() != family.n_qubits()) {
        throw std::invalid_argument("evolve_reference: dimension mismatch");
    }
    StateVector cur = psi;
    const double tau = (t1 - t0) / substeps;
    for (int i = 0; i < substeps; ++i) {
        const double s_mid = s_of_t(t0 + (i + 0.5) * tau);
        auto apply_h = [&](const StateVector& in, StateVector& out) {
            family.apply_add(s_mid, in, out);
        };
        cur = expm_krylov(apply_h, tau, cur, 1e-15);
    }
    return cur;
}

} // namespace aqc
