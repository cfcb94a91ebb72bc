#pragma once

#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aqc/state_vector.hpp"

namespace aqc {

/// One weighted Pauli string. Letters are given leftmost = qubit 0.
/// Internally: flip_mask marks X/Y qubits, sign_mask marks Y/Z qubits,
/// phase = i^(#Y); so P|j> = coeff * phase * (-1)^popcount(j & sign_mask) |j ^ flip_mask>.
struct PauliTerm {
    double coeff = 0.0;
    std::uint64_t flip_mask = 0;
    std::uint64_t sign_mask = 0;
    cplx phase{1.0, 0.0};

    bool diagonal() const { return flip_mask == 0; }
};

/// Hermitian operator stored as a real-weighted Pauli-string sum with
/// matrix-free action. Strings containing only I/Z get a precomputed
/// diagonal, the dominant case for clause-penalty Hamiltonians.
class Observable {
  public:
    Observable() = default;

    Observable(int n_qubits, std::vector<std::pair<double, std::string>> terms)
        : n_qubits_(n_qubits) {
        if (n_qubits < 1) throw std::invalid_argument("Observable: need n_qubits >= 1");
        for (auto& [c, s] : terms) add_term(c, s);
        finalize();
    }

    int n_qubits() const { return n_qubits_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    bool is_diagonal() const { return diagonal_only_; }

    /// Upper bound on the spectral norm: sum of |coeff|.
    double norm_bound() const {
        double s = 0.0;
        for (const auto& t : terms_) s += std::abs(t.coeff);
        return s;
    }

    /// out += scale * H |in>
    void apply_add(const StateVector& in, StateVector& out, double scale = 1.0) const {
        if (in.n_qubits() != n_qubits_ || out.n_qubits() != n_qubits_) {
            throw std::invalid_argument("Observable: state dimension mismatch");
        }
        const std::size_t dim = in.size();
        if (diagonal_only_) {
            for (std::size_t j = 0; j < dim; ++j) out[j] += scale * diagonal_[j] * in[j];
            return;
        }
        for (const auto& t : terms_) {
            const cplx w = scale * t.coeff * t.phase;
            if (t.sign_mask == 0 && t.flip_mask == 0) {
                for (std::size_t j = 0; j < dim; ++j) out[j] += w * in[j];
            } else if (t.flip_mask == 0) {
                for (std::size_t j = 0; j < dim; ++j) {
                    const double sg = (std::popcount(j & t.sign_mask) & 1) ? -1.0 : 1.0;
                    out[j] += w * sg * in[j];
                }
            } else {
                for (std::size_t j = 0; j < dim; ++j) {
                    const double sg = (std::popcount(j & t.sign_mask) & 1) ? -1.0 : 1.0;
                    out[j ^ t.flip_mask] += w * sg * in[j];
                }
            }
        }
    }

    StateVector apply(const StateVector& in) const {
        StateVector out(n_qubits_);
        apply_add(in, out);
        return out;
    }

    /// <psi|H|psi>. The imaginary residue must vanish for a Hermitian sum.
    double expectation(const StateVector& psi) const {
        StateVector hpsi = apply(psi);
        const cplx v = inner(psi, hpsi);
        assert(std::abs(v.imag()) <= 1e-12 * (1.0 + std::abs(v.real())));
        return v.real();
    }

    /// <H^2> - <H>^2, clamped to >= 0. Uses <H^2> = ||H psi||^2 (Hermiticity).
    double variance(const StateVector& psi) const {
        StateVector hpsi = apply(psi);
        const double h2 = [&] {
            double s = 0.0;
            for (const auto& c : hpsi.amplitudes()) s += std::norm(c);
            return s;
        }();
        const cplx h1 = inner(psi, hpsi);
        const double var = h2 - h1.real() * h1.real();
        return var < 0.0 ? 0.0 : var;
    }

    const std::vector<double>& diagonal() const {
        if (!diagonal_only_) throw std::logic_error("Observable: not diagonal");
        return diagonal_;
    }

    /// Merge of a*this + b*other into a single Pauli sum.
    static Observable combine(const Observable& lhs, double a, const Observable& rhs, double b) {
        if (lhs.n_qubits_ != rhs.n_qubits_) {
            throw std::invalid_argument("Observable: qubit count mismatch");
        }
        Observable out;
        out.n_qubits_ = lhs.n_qubits_;
        std::map<std::pair<std::uint64_t, std::uint64_t>, PauliTerm> acc;
        auto fold = [&](const Observable& src, double w) {
            for (const auto& t : src.terms_) {
                auto key = std::make_pair(t.flip_mask, t.sign_mask);
                auto it = acc.find(key);
                if (it == acc.end()) {
                    PauliTerm nt = t;
                    nt.coeff *= w;
                    acc.emplace(key, nt);
                } else {
                    it->second.coeff += w * t.coeff;
                }
            }
        };
        fold(lhs, a);
        fold(rhs, b);
        for (auto& [k, t] : acc) {
            if (t.coeff != 0.0) out.terms_.push_back(t);
        }
        out.finalize();
        return out;
    }

    static Observable scaled(const Observable& obs, double a) { return combine(obs, a, obs, 0.0); }

  private:
    void add_term(double coeff, const std::string& pauli) {
        if (static_cast<int>(pauli.size()) != n_qubits_) {
            throw std::invalid_argument("Observable: Pauli string length != n_qubits");
        }
        PauliTerm t;
        t.coeff = coeff;
        int n_y = 0;
        for (int q = 0; q < n_qubits_; ++q) {
            const std::uint64_t bit = std::uint64_t{1} << q;
            switch (pauli[q]) {
                case 'I': break;
                case 'X': t.flip_mask |= bit; break;
                case 'Y': t.flip_mask |= bit; t.sign_mask |= bit; ++n_y; break;
                case 'Z': t.sign_mask |= bit; break;
                default: throw std::invalid_argument("Observable: bad Pauli letter");
            }
        }
        static constexpr cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        t.phase = i_pow[n_y & 3];
        terms_.push_back(t);
    }

    void finalize() {
        diagonal_only_ = true;
        for (const auto& t : terms_) {
            if (!t.diagonal()) { diagonal_only_ = false; break; }
        }
        if (diagonal_only_) {
            const std::size_t dim = std::size_t{1} << n_qubits_;
            diagonal_.assign(dim, 0.0);
            for (const auto& t : terms_) {
                for (std::size_t j = 0; j < dim; ++j) {
                    diagonal_[j] += ((std::popcount(j & t.sign_mask) & 1) ? -t.coeff : t.coeff);
                }
            }
        }
    }

    int n_qubits_ = 0;
    std::vector<PauliTerm> terms_;
    bool diagonal_only_ = true;
    std::vector<double> diagonal_;
};

inline double expectation(const StateVector& psi, const Observable& obs) {
    return obs.expectation(psi);
}

inline double variance(const StateVector& psi, const Observable& obs) {
    return obs.variance(psi);
}

/// Pure-state quantum Fisher information with generator H.
inline double quantum_fisher_information(const StateVector& psi, const Observable& obs) {
    return 4.0 * obs.variance(psi);
}

} // namespace aqc
