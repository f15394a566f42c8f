#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qotto/errors.hpp"

namespace qotto {

// Internal units: hbar = 1, energies in E0. Times at every public interface
// are in units of t0 = h/E0, which equals 2*pi in internal time.
inline constexpr double kT0 = 6.283185307179586476925286766559;

// One sample of the driving field, components in E0, time in t0.
struct FieldSample {
    double x = 0.0, y = 0.0, z = 0.0;
    double time = 0.0;

    bool operator==(const FieldSample&) const = default;
};

namespace protocol {

// Time-sampled driving-field control. Protocols built from an analytic sweep
// also carry the exact evaluator; explicit sample tables interpolate
// linearly. Times are strictly increasing and cover [t_start, t_end].
struct FieldProtocol {
    std::vector<FieldSample> samples;
    double t_start = 0.0;
    double t_end = 0.0;
    std::function<FieldSample(double)> analytic;  // optional exact field

    // Field at time t (t0 units); clamps outside [t_start, t_end].
    FieldSample at(double t) const;
    double duration() const { return t_end - t_start; }

    void validate() const;
};

// Builds a protocol from an explicit sample table.
FieldProtocol from_samples(std::vector<FieldSample> samples);

// Constant-x / tanh-z sweep:
//   X(t) = Delta,  Y(t) = 0,
//   Z(t) = (u_f - u_i)/2 tanh((t - (t1+t2)/2)/tau) + (u_i + u_f)/2
// with t, t1, t2 in t0 units and tau the dimensionless adiabatic parameter.
struct TanhSweepConfig {
    double delta = 1.0;  // transverse amplitude (E0)
    double u_i = 2.0;    // asymptotic initial z amplitude (E0)
    double u_f = 0.0;    // asymptotic final z amplitude (E0)
    double t1 = 0.0;     // window start (t0)
    double t2 = 20.0;    // window end (t0), widened to t1 + 20*tau if shorter
    double tau = 1.0;    // adiabatic parameter

    void validate() const;
    double z_at(double t) const;          // after widening
    double window_end() const;            // t2 after widening

    bool operator==(const TanhSweepConfig&) const = default;
};

// Samples the sweep on a uniform n-point grid over the (possibly widened)
// window; carries the exact evaluator alongside the table.
FieldProtocol tanh_sweep(const TanhSweepConfig& cfg, int n_samples = 2001);

// Rabi frequencies of the first and last protocol samples (E0/hbar).
std::pair<double, double> endpoint_frequencies(const FieldProtocol& p);

// Rabi frequencies implied by the sweep's asymptotic amplitudes u_i, u_f;
// inside any finite window the tanh only approaches these, so cycle math
// uses them by default for exact reproduction of quoted level splittings.
std::pair<double, double> asymptotic_frequencies(const TanhSweepConfig& cfg);

}  // namespace protocol
}  // namespace qotto
