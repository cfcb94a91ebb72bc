#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aqc/observable.hpp"
#include "aqc/state_vector.hpp"

namespace aqc {

struct SpectrumResult {
    double energy = 0.0;
    StateVector state;
    double residual_norm = 0.0;
};

struct GroundStateError : std::runtime_error {
    double residual;
    GroundStateError(const std::string& what, double res)
        : std::runtime_error(what), residual(res) {}
};

namespace detail {

inline Eigen::VectorXcd to_eigen(const StateVector& psi) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(psi.size()));
    for (std::size_t i = 0; i < psi.size(); ++i) v[static_cast<Eigen::Index>(i)] = psi[i];
    return v;
}

inline StateVector from_eigen(int n_qubits, const Eigen::VectorXcd& v) {
    StateVector psi(n_qubits);
    for (Eigen::Index i = 0; i < v.size(); ++i) psi[static_cast<std::size_t>(i)] = v[i];
    return psi;
}

inline double residual_norm(const Observable& obs, const SpectrumResult& r) {
    StateVector res = obs.apply(r.state);
    double s = 0.0;
    for (std::size_t i = 0; i < res.size(); ++i) s += std::norm(res[i] - r.energy * r.state[i]);
    return std::sqrt(s);
}

inline std::vector<SpectrumResult> ground_space_diagonal(const Observable& obs, double tol) {
    const auto& d = obs.diagonal();
    const double e0 = *std::min_element(d.begin(), d.end());
    std::vector<SpectrumResult> out;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (d[j] <= e0 + tol) {
            out.push_back({d[j], StateVector::basis_state(obs.n_qubits(), j), 0.0});
        }
    }
    return out;
}

inline std::vector<SpectrumResult> ground_space_dense(const Observable& obs, double tol) {
    const std::size_t dim = std::size_t{1} << obs.n_qubits();
    Eigen::MatrixXcd mat(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        StateVector e = StateVector::basis_state(obs.n_qubits(), col);
        StateVector he = obs.apply(e);
        for (std::size_t row = 0; row < dim; ++row) {
            mat(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = he[row];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat);
    if (es.info() != Eigen::Success) throw GroundStateError("dense eigensolver failed", -1.0);
    const double e0 = es.eigenvalues()[0];
    std::vector<SpectrumResult> out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        if (es.eigenvalues()[k] <= e0 + tol) {
            SpectrumResult r;
            r.energy = es.eigenvalues()[k];
            r.state = from_eigen(obs.n_qubits(), es.eigenvectors().col(k));
            r.residual_norm = residual_norm(obs, r);
            out.push_back(std::move(r));
        } else {
            break;
        }
    }
    return out;
}

/// Lanczos with full reorthogonalization against the basis and against
/// previously deflated eigenvectors; restarted until the residual converges.
inline SpectrumResult lowest_eigenpair_lanczos(const Observable& obs,
                                               const std::vector<StateVector>& deflate,
                                               std::uint64_t seed) {
    const int n = obs.n_qubits();
    const std::size_t dim = std::size_t{1} << n;
    const int m_max = std::min<std::size_t>(80, dim);
    const int max_restarts = 200;

    auto project_out = [&](StateVector& v) {
        for (const auto& d : deflate) {
            const cplx ov = inner(d, v);
            for (std::size_t i = 0; i < dim; ++i) v[i] -= ov * d[i];
        }
    };

    StateVector x = StateVector::random_state(n, seed);
    project_out(x);
    if (x.norm() < 1e-8) throw GroundStateError("deflation space exhausts the start vector", -1.0);
    x.normalize();

    SpectrumResult best;
    for (int restart = 0; restart < max_restarts; ++restart) {
        std::vector<StateVector> basis;
        std::vector<double> alpha, beta;
        basis.push_back(x);
        for (int k = 0; k < m_max; ++k) {
            StateVector w = obs.apply(basis[k]);
            project_out(w);
            // full reorthogonalization, twice for stability
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t b = 0; b < basis.size(); ++b) {
                    const cplx ov = inner(basis[b], w);
                    if (pass == 0 && b == basis.size() - 1) alpha.push_back(ov.real());
                    for (std::size_t i = 0; i < dim; ++i) w[i] -= ov * basis[b][i];
                }
            }
            const double bnorm = w.norm();
            if (bnorm < 1e-13 || k == m_max - 1) break;
            beta.push_back(bnorm);
            w.normalize();
            basis.push_back(std::move(w));
        }
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        StateVector y(n);
        for (int i = 0; i < m; ++i) {
            const double c = es.eigenvectors()(i, 0);
            for (std::size_t j = 0; j < dim; ++j) y[j] += c * basis[i][j];
        }
        y.normalize();
        best.energy = es.eigenvalues()[0];
        best.state = y;
        best.residual_norm = residual_norm(obs, best);
        const double scale = std::max(1.0, obs.norm_bound());
        if (best.residual_norm <= 1e-9 * scale) return best;
        x = best.state;
    }
    throw GroundStateError("Lanczos ground state did not converge", best.residual_norm);
}

} // namespace detail

/// Lowest eigenpair(s) of a Hermitian Pauli sum. When the gap to the next
/// level is below degeneracy_tol the whole degenerate subspace is returned.
/// degeneracy_tol < 0 selects the default 1e-9 * norm_bound.
inline std::vector<SpectrumResult> ground_space(const Observable& obs,
                                                double degeneracy_tol = -1.0) {
    const double tol =
        degeneracy_tol >= 0.0 ? degeneracy_tol : 1e-9 * std::max(1.0, obs.norm_bound());
    if (obs.is_diagonal()) return detail::ground_space_diagonal(obs, tol);
    if (obs.n_qubits() <= 10) return detail::ground_space_dense(obs, tol);
    std::vector<SpectrumResult> out;
    std::vector<StateVector> deflate;
    for (int k = 0; k < 16; ++k) {
        SpectrumResult r = detail::lowest_eigenpair_lanczos(obs, deflate, 0x9e3779b97f4a7c15ULL + k);
        if (!out.empty() && r.energy > out.front().energy + tol) break;
        deflate.push_back(r.state);
        out.push_back(std::move(r));
    }
    return out;
}

inline SpectrumResult ground_state(const Observable& obs, double degeneracy_tol = -1.0) {
    return ground_space(obs, degeneracy_tol).front();
}

/// Squared norm of the projection of psi onto a (possibly degenerate) subspace.
inline double subspace_fidelity(const StateVector& psi, const std::vector<SpectrumResult>& space) {
    double f = 0.0;
    for (const auto& r : space) f += std::norm(inner(r.state, psi));
    return f > 1.0 ? 1.0 : f;
}

} // namespace aqc
