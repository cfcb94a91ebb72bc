#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace aqc {

using cplx = std::complex<double>;

/// Normalized complex amplitude vector over 2^n computational basis states.
class StateVector {
  public:
    StateVector() = default;

    explicit StateVector(int n_qubits)
        : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits, cplx{0.0, 0.0}) {
        if (n_qubits < 1 || n_qubits > 30) {
            throw std::invalid_argument("StateVector: qubit count out of range");
        }
    }

    StateVector(int n_qubits, std::vector<cplx> amplitudes)
        : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
        if (amps_.size() != (std::size_t{1} << n_qubits)) {
            throw std::invalid_argument("StateVector: amplitude length != 2^n");
        }
    }

    static StateVector basis_state(int n_qubits, std::uint64_t index) {
        StateVector psi(n_qubits);
        psi.amps_.at(index) = 1.0;
        return psi;
    }

    /// |+>^n, the ground state of a uniform transverse field.
    static StateVector uniform_plus(int n_qubits) {
        StateVector psi(n_qubits);
        const double a = 1.0 / std::sqrt(static_cast<double>(psi.size()));
        for (auto& c : psi.amps_) c = a;
        return psi;
    }

    static StateVector random_state(int n_qubits, std::uint64_t seed) {
        StateVector psi(n_qubits);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 1.0);
        for (auto& c : psi.amps_) c = cplx{g(rng), g(rng)};
        psi.normalize();
        return psi;
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t size() const { return amps_.size(); }

    cplx& operator[](std::size_t i) { return amps_[i]; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }

    std::vector<cplx>& amplitudes() { return amps_; }
    const std::vector<cplx>& amplitudes() const { return amps_; }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& c : amps_) s += std::norm(c);
        return s;
    }
    double norm() const { return std::sqrt(norm_sq()); }

    void normalize() {
        const double n = norm();
        if (n == 0.0) throw std::domain_error("StateVector: cannot normalize zero vector");
        const double inv = 1.0 / n;
        for (auto& c : amps_) c *= inv;
    }

  private:
    int n_qubits_ = 0;
    std::vector<cplx> amps_;
};

inline void check_same_dims(const StateVector& a, const StateVector& b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw std::invalid_argument("state dimension mismatch");
    }
}

/// <a|b>
inline cplx inner(const StateVector& a, const StateVector& b) {
    check_same_dims(a, b);
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

/// |<a|b>|^2; symmetric and global-phase invariant.
inline double fidelity(const StateVector& a, const StateVector& b) {
    const double f = std::norm(inner(a, b));
    return f > 1.0 ? 1.0 : f;
}

} // namespace aqc
