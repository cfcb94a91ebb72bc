#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "aqc/scheduler.hpp"
#include "aqc/spectrum.hpp"

namespace aqc {

struct ZenoParams {
    double t_z = 0.0; // interval between projective energy measurements
    AdaptiveParams base;
    /// Deterministic success-branch simulation by default: project onto the
    /// instantaneous ground space, renormalize, accumulate the probability.
    /// The stochastic mode samples each outcome instead (validation only).
    bool stochastic = false;
    std::uint64_t seed = 0;
};

struct ZenoMeasurement {
    double t = 0.0;       // accepted-step boundary the measurement snapped to
    double target_t = 0.0; // k * t_z
    double s = 0.0;
    double survival = 0.0; // P_i
    bool excited = false;  // stochastic mode only
};

struct ZenoRecord {
    std::vector<double> survival_probs;
    double cumulative = 1.0; // P_nz = prod P_i
    double final_infidelity = 0.0;
    std::vector<ZenoMeasurement> measurements;
};

/// Adaptive run interleaved with projective ground-state measurements every
/// t_z of accepted physical time. Measurement instants snap forward to the
/// next accepted-step boundary; the offset is recorded.
inline std::pair<Trajectory, ZenoRecord> run_with_zeno(const HamiltonianFamily& family,
                                                       const ZenoParams& zeno,
                                                       std::optional<StateVector> initial =
                                                           std::nullopt) {
    if (zeno.t_z <= 0.0) throw std::invalid_argument("run_with_zeno: t_z must be > 0");
    ZenoRecord record;
    std::mt19937_64 rng(zeno.seed);
    double next_target = zeno.t_z;

    auto measure = [&](double t, double s, StateVector& psi) {
        while (t >= next_target) {
            const auto space = ground_space(family.at(s));
            ZenoMeasurement m;
            m.t = t;
            m.target_t = next_target;
            m.s = s;
            m.survival = subspace_fidelity(psi, space);

            StateVector proj(psi.n_qubits());
            for (const auto& g : space) {
                const cplx ov = inner(g.state, psi);
                for (std::size_t i = 0; i < psi.size(); ++i) proj[i] += ov * g.state[i];
            }
            if (zeno.stochastic) {
                std::uniform_real_distribution<double> u(0.0, 1.0);
                if (u(rng) <= m.survival) {
                    proj.normalize();
                    psi = proj;
                } else {
                    m.excited = true;
                    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] -= proj[i];
                    psi.normalize();
                }
            } else {
                proj.normalize();
                psi = proj;
            }
            record.survival_probs.push_back(m.survival);
            record.cumulative *= m.survival;
            record.measurements.push_back(m);
            next_target += zeno.t_z;
        }
    };

    Trajectory traj = run_adiabatic(family, zeno.base, std::move(initial), measure);
    record.final_infidelity =
        1.0 - subspace_fidelity(traj.final_state, ground_space(family.at(1.0)));
    return {std::move(traj), std::move(record)};
}

struct ZenoSweepRow {
    double t_z = 0.0;
    double t_z_over_t = 0.0;
    double infidelity = 0.0;
    double failure_prob = 0.0; // 1 - P_nz
    int n_z = 0;
};

/// One run per grid point; t_z/T is normalized by the plain (no-measurement)
/// run's total time for the same parameter set.
inline std::vector<ZenoSweepRow> zeno_sweep(const HamiltonianFamily& family,
                                            const AdaptiveParams& base,
                                            const std::vector<double>& t_z_grid,
                                            std::optional<StateVector> initial = std::nullopt,
                                            double* plain_total_time = nullptr,
                                            double* plain_infidelity = nullptr) {
    Trajectory plain = run_adiabatic(family, base, initial);
    const double t_plain = plain.total_time;
    if (plain_total_time) *plain_total_time = t_plain;
    if (plain_infidelity) {
        *plain_infidelity = 1.0 - subspace_fidelity(plain.final_state, ground_space(family.at(1.0)));
    }
    std::vector<ZenoSweepRow> rows;
    for (double t_z : t_z_grid) {
        if (t_z <= 0.0) throw std::invalid_argument("zeno_sweep: t_z grid must be positive");
        ZenoParams zp;
        zp.t_z = t_z;
        zp.base = base;
        auto [traj, rec] = run_with_zeno(family, zp, initial);
        rows.push_back({t_z, t_z / t_plain, rec.final_infidelity, 1.0 - rec.cumulative,
                        static_cast<int>(rec.survival_probs.size())});
    }
    return rows;
}

} // namespace aqc
