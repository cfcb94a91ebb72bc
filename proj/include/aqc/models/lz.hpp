#pragma once

#include <cmath>

#include "aqc/hamiltonian_family.hpp"
#include "aqc/observable.hpp"

namespace aqc::models {

/// Two-level avoided-crossing testbed, H(s)/J = X + s Z on s in [0,1].
inline HamiltonianFamily lz_family() {
    Observable x(1, {{1.0, "X"}});
    Observable z(1, {{1.0, "Z"}});
    return HamiltonianFamily({{x, 1.0, 0.0}, {z, 0.0, 1.0}});
}

inline Observable lz_hamiltonian(double s) { return lz_family().at(s); }

/// Exact instantaneous gap 2 sqrt(1 + s^2).
inline double lz_gap(double s) { return 2.0 * std::sqrt(1.0 + s * s); }

} // namespace aqc::models
