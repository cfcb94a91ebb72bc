#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "aqc/state_vector.hpp"

namespace aqc {

/// Matrix-free Lanczos approximation of exp(-i tau H)|psi> for Hermitian H.
/// The Krylov basis is built with full reorthogonalization; convergence is
/// declared once the projected propagator coefficients stop moving below
/// `tol`. The result is renormalized, so the step is unitary up to the
/// expansion tolerance.
inline StateVector expm_krylov(const std::function<void(const StateVector&, StateVector&)>& apply_h,
                               double tau, const StateVector& psi, double tol = 1e-13,
                               int m_max = 64) {
    const int n = psi.n_qubits();
    const std::size_t dim = psi.size();
    if (static_cast<std::size_t>(m_max) > dim) m_max = static_cast<int>(dim);
    if (tau == 0.0) return psi;

    std::vector<StateVector> basis;
    std::vector<double> alpha, beta;
    basis.push_back(psi);

    auto small_exp = [&](int m) -> Eigen::VectorXcd {
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        Eigen::VectorXcd phase(m);
        for (int i = 0; i < m; ++i) {
            phase[i] = std::exp(cplx{0.0, -tau * es.eigenvalues()[i]});
        }
        // exp(-i tau T) e1
        return es.eigenvectors() * (phase.asDiagonal() * es.eigenvectors().row(0).transpose().conjugate());
    };

    Eigen::VectorXcd coeff_prev;
    int m_used = 0;
    bool breakdown = false;
    for (int k = 0; k < m_max; ++k) {
        StateVector w(n);
        apply_h(basis[k], w);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t b = 0; b < basis.size(); ++b) {
                const cplx ov = inner(basis[b], w);
                if (pass == 0 && b == basis.size() - 1) alpha.push_back(ov.real());
                for (std::size_t i = 0; i < dim; ++i) w[i] -= ov * basis[b][i];
            }
        }
        m_used = k + 1;
        const double bnorm = w.norm();
        if (bnorm < 1e-14) { breakdown = true; }

        if (breakdown || k >= 1) {
            Eigen::VectorXcd coeff = small_exp(m_used);
            if (breakdown) { coeff_prev = coeff; break; }
            if (coeff_prev.size() > 0) {
                double diff = (coeff.head(coeff_prev.size()) - coeff_prev).norm();
                coeff_prev = coeff;
                if (diff < tol) break;
            } else {
                coeff_prev = coeff;
            }
        }
        if (k + 1 < m_max) {
            beta.push_back(bnorm);
            w.normalize();
            basis.push_back(std::move(w));
        }
    }

    StateVector out(n);
    for (int i = 0; i < static_cast<int>(coeff_prev.size()) && i < static_cast<int>(basis.size());
         ++i) {
        const cplx c = coeff_prev[i];
        for (std::size_t j = 0; j < dim; ++j) out[j] += c * basis[i][j];
    }
    out.normalize();
    return out;
}

} // namespace aqc
