#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aqc/observable.hpp"
#include "aqc/state_vector.hpp"

namespace aqc {

/// Schedule-parameterized Hamiltonian H(s) = sum_k (c0_k + c1_k s) * O_k
/// for s in [0,1]. Covers both the avoided-crossing testbed
/// (X + s Z) and the annealing interpolation (1-s) H_B + s H_P while keeping
/// each component's fast path (diagonal H_P in particular).
class HamiltonianFamily {
  public:
    struct Component {
        Observable op;
        double c0 = 0.0; // constant coefficient
        double c1 = 0.0; // coefficient of s
    };

    HamiltonianFamily() = default;
    explicit HamiltonianFamily(std::vector<Component> comps) : comps_(std::move(comps)) {
        if (comps_.empty()) throw std::invalid_argument("HamiltonianFamily: no components");
        n_qubits_ = comps_.front().op.n_qubits();
        for (const auto& c : comps_) {
            if (c.op.n_qubits() != n_qubits_) {
                throw std::invalid_argument("HamiltonianFamily: qubit count mismatch");
            }
        }
    }

    /// (1-s) * begin + s * end interpolation.
    static HamiltonianFamily interpolation(Observable begin, Observable end) {
        std::vector<Component> c;
        c.push_back({std::move(begin), 1.0, -1.0});
        c.push_back({std::move(end), 0.0, 1.0});
        return HamiltonianFamily(std::move(c));
    }

    int n_qubits() const { return n_qubits_; }
    const std::vector<Component>& components() const { return comps_; }

    void apply_add(double s, const StateVector& in, StateVector& out) const {
        for (const auto& c : comps_) {
            const double w = c.c0 + c.c1 * s;
            if (w != 0.0) c.op.apply_add(in, out, w);
        }
    }

    StateVector apply(double s, const StateVector& in) const {
        StateVector out(n_qubits_);
        apply_add(s, in, out);
        return out;
    }

    double expectation(double s, const StateVector& psi) const {
        StateVector hpsi = apply(s, psi);
        return inner(psi, hpsi).real();
    }

    double variance(double s, const StateVector& psi) const {
        StateVector hpsi = apply(s, psi);
        double h2 = 0.0;
        for (const auto& c : hpsi.amplitudes()) h2 += std::norm(c);
        const double h1 = inner(psi, hpsi).real();
        const double var = h2 - h1 * h1;
        return var < 0.0 ? 0.0 : var;
    }

    double qfi(double s, const StateVector& psi) const { return 4.0 * variance(s, psi); }

    /// Merged single Observable at fixed s (for solvers and diagnostics).
    Observable at(double s) const {
        Observable acc = Observable::scaled(comps_.front().op, comps_.front().c0 + comps_.front().c1 * s);
        for (std::size_t k = 1; k < comps_.size(); ++k) {
            acc = Observable::combine(acc, 1.0, comps_[k].op, comps_[k].c0 + comps_[k].c1 * s);
        }
        return acc;
    }

    double norm_bound(double s) const {
        double b = 0.0;
        for (const auto& c : comps_) b += std::abs(c.c0 + c.c1 * s) * c.op.norm_bound();
        return b;
    }

    double max_norm_bound() const { return std::max(norm_bound(0.0), norm_bound(1.0)); }

    /// Upper bound on ||dH/ds||.
    double deriv_norm_bound() const {
        double b = 0.0;
        for (const auto& c : comps_) b += std::abs(c.c1) * c.op.norm_bound();
        return b;
    }

    /// True when every component coefficient is independent of s.
    bool constant_in_s() const {
        for (const auto& c : comps_) {
            if (c.c1 != 0.0) return false;
        }
        return true;
    }

  private:
    int n_qubits_ = 0;
    std::vector<Component> comps_;
};

} // namespace aqc
