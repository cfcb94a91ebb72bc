#pragma once

// Test-only oracles, deliberately independent of the library's matrix-free
// paths: dense Kronecker-product construction of Pauli sums, dense unitary
// propagation via eigendecomposition, adaptive Simpson quadrature, and a
// brute-force clause evaluator.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "aqc/observable.hpp"
#include "aqc/state_vector.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using aqc::cplx;

inline Mat pauli_matrix(char letter) {
    Mat m(2, 2);
    switch (letter) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("bad Pauli letter");
    }
    return m;
}

/// Dense matrix of one Pauli string; leftmost letter is qubit 0, which is the
/// least significant bit of the basis index.
inline Mat pauli_string_matrix(const std::string& pauli) {
    Mat acc = Mat::Identity(1, 1);
    // qubit q occupies bit q of the basis index, so each new letter goes on
    // the high side of the Kronecker product
    for (auto it = pauli.begin(); it != pauli.end(); ++it) {
        const Mat p = pauli_matrix(*it);
        Mat next(acc.rows() * 2, acc.cols() * 2);
        next.topLeftCorner(acc.rows(), acc.cols()) = p(0, 0) * acc;
        next.topRightCorner(acc.rows(), acc.cols()) = p(0, 1) * acc;
        next.bottomLeftCorner(acc.rows(), acc.cols()) = p(1, 0) * acc;
        next.bottomRightCorner(acc.rows(), acc.cols()) = p(1, 1) * acc;
        acc = next;
    }
    return acc;
}

inline Mat pauli_sum_matrix(int n_qubits,
                            const std::vector<std::pair<double, std::string>>& terms) {
    const int dim = 1 << n_qubits;
    Mat acc = Mat::Zero(dim, dim);
    for (const auto& [c, s] : terms) acc += c * pauli_string_matrix(s);
    return acc;
}

inline Vec to_vec(const aqc::StateVector& psi) {
    Vec v(static_cast<Eigen::Index>(psi.size()));
    for (std::size_t i = 0; i < psi.size(); ++i) v[static_cast<Eigen::Index>(i)] = psi[i];
    return v;
}

inline aqc::StateVector to_state(int n_qubits, const Vec& v) {
    aqc::StateVector psi(n_qubits);
    for (Eigen::Index i = 0; i < v.size(); ++i) psi[static_cast<std::size_t>(i)] = v[i];
    return psi;
}

/// exp(-i H tau) v for a dense Hermitian H, via full eigendecomposition.
inline Vec dense_propagate(const Mat& h, double tau, const Vec& v) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases(h.rows());
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
        phases[k] = std::exp(cplx(0.0, -tau * es.eigenvalues()[k]));
    }
    return es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * v));
}

/// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-13, int depth = 30) {
    auto simpson = [&](double lo, double hi) {
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
    };
    std::function<double(double, double, double, int)> rec = [&](double lo, double hi, double whole,
                                                                 int d) -> double {
        const double mid = 0.5 * (lo + hi);
        const double left = simpson(lo, mid), right = simpson(mid, hi);
        if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
            return left + right + (left + right - whole) / 15.0;
        }
        return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
    };
    return rec(a, b, simpson(a, b), depth);
}

} // namespace oracle
