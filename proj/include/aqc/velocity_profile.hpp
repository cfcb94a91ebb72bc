#pragma once

#include <cmath>
#include <stdexcept>

namespace aqc {

/// Erf-smoothed sweep-velocity ramp from v_prev to v_next across a step
/// window, removing the kinks a piecewise-constant velocity would put into
/// the drive:
///   v(t) = (v_prev+v_next)/2 + (v_next-v_prev)/2 * erf(k (2(t-t_start)/duration - 1))
/// The centered argument makes the erf part integrate to exactly zero over
/// the window, so the swept distance has the closed form
/// duration*(v_prev+v_next)/2.
struct VelocityProfile {
    double v_prev = 0.0;
    double v_next = 0.0;
    double t_start = 0.0;
    double duration = 0.0;
    double steepness = 9.0;

    double value(double t) const {
        check_window(t);
        const double mean = 0.5 * (v_prev + v_next);
        const double half = 0.5 * (v_next - v_prev);
        return mean + half * std::erf(steepness * centered(t));
    }

    /// Exact swept distance over the full window.
    double displacement() const { return duration * 0.5 * (v_prev + v_next); }

    /// Exact swept distance over [t_start, t]; antiderivative of erf is
    /// x erf(x) + exp(-x^2)/sqrt(pi).
    double displacement_to(double t) const {
        check_window(t);
        if (duration == 0.0) return 0.0;
        const double mean = 0.5 * (v_prev + v_next);
        const double half = 0.5 * (v_next - v_prev);
        const double k = steepness;
        const double u = k * centered(t);
        auto erf_antideriv = [](double x) {
            return x * std::erf(x) + std::exp(-x * x) / std::sqrt(M_PI);
        };
        const double erf_int = (erf_antideriv(u) - erf_antideriv(-k)) * duration / (2.0 * k);
        return mean * (t - t_start) + half * erf_int;
    }

  private:
    double centered(double t) const { return 2.0 * (t - t_start) / duration - 1.0; }

    void check_window(double t) const {
        const double slack = 1e-12 * (std::abs(duration) + std::abs(t_start) + 1.0);
        if (t < t_start - slack || t > t_start + duration + slack) {
            throw std::domain_error("VelocityProfile: t outside the step window");
        }
    }
};

/// Branch duration that lands an erf ramp v_prev -> v_end exactly on the
/// target swept distance. Reduces to ds/v_end when v_prev == v_end.
inline double duration_for_displacement(double v_prev, double v_end, double ds) {
    const double mean = 0.5 * (v_prev + v_end);
    if (mean <= 0.0) throw std::domain_error("duration_for_displacement: non-positive mean velocity");
    return ds / mean;
}

} // namespace aqc
