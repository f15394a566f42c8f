#pragma once

#include <optional>
#include <string>

#include "qotto/errors.hpp"
#include "qotto/spin_system.hpp"

// Otto-cycle energetics for the coupled pair. The cycle alternates full
// thermalizations (hot bath at the initial spectrum, cold bath at the final
// one) with unitary driving strokes; everything reduces to closed forms in
// the endpoint splittings, the coupling, the bath temperatures and the
// persistence probabilities of the driving stroke.
//
// Sign convention: heats are positive when absorbed by the working
// substance; work W = Q_h + Q_c is positive when delivered by it.

namespace qotto::thermo {

// Bath temperatures in E0/kB; requires T_h > T_c > 0.
struct BathConfig {
    double T_h = 1.0;
    double T_c = 0.5;

    BathConfig() = default;
    BathConfig(double hot, double cold) : T_h(hot), T_c(cold) { validate(); }
    void validate() const;
    double beta_h() const { return 1.0 / T_h; }
    double beta_c() const { return 1.0 / T_c; }

    bool operator==(const BathConfig&) const = default;
};

// Endpoint data of one cycle: splittings hbar*omega_1, hbar*omega_2 (E0),
// coupling J (E0) and the persistence triple of the driving stroke.
struct CycleInputs {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double J = 0.0;
    spin::Persistence persistence;

    void validate() const;  // omegas positive, triple realizable
};

enum class Regime { engine, refrigerator, accelerator, heater, boundary };
std::string to_string(Regime r);

// Full energy audit of one cycle.
struct CycleReport {
    double E_A = 0.0, E_B = 0.0, E_C = 0.0, E_D = 0.0;
    double Qh_leak = 0.0, Qh_ad = 0.0, Qh_fric = 0.0;
    double Qc_leak = 0.0, Qc_ad = 0.0, Qc_fric = 0.0;
    double Q_h = 0.0, Q_c = 0.0, W = 0.0;
    std::optional<double> efficiency;  // W/Q_h, engine regime only
    Regime regime = Regime::boundary;
};

// Z = 1 + exp(8 J beta) + exp(-beta hbar omega) + exp(+beta hbar omega).
// Throws RangeError when an exponent exceeds 700 (double overflow).
double partition_function(double beta, double omega, double J);

// Mean thermal energies at the four cycle points. A: hot thermal state at
// the initial spectrum; B: after the forward driving stroke; C: cold
// thermal state at the final spectrum; D: after the backward stroke (same
// transition probabilities as forward).
double energy_A(const BathConfig& b, const CycleInputs& in);
double energy_B(const BathConfig& b, const CycleInputs& in);
double energy_C(const BathConfig& b, const CycleInputs& in);
double energy_D(const BathConfig& b, const CycleInputs& in);

// Heats, work and the three-way decomposition of each heat into a
// coupling-induced leak between the baths (Qc_leak = -Qh_leak identically),
// the adiabatic part, and the nonadiabatic friction part that vanishes at
// persistence (1,1,1). W = Q_h + Q_c holds at formula level.
CycleReport heats(const BathConfig& b, const CycleInputs& in);

// Sign-based classification; quantities within 1e-12 * max(|Q_h|, |Q_c|, 1)
// of zero classify as `boundary`. Throws InconsistentEnergies when
// W != Q_h + Q_c (1e-12 relative) or on a sign pattern forbidden by the
// second law.
Regime classify_regime(double Q_h, double Q_c, double W);

enum class Quantity { Q_h, Q_c, W };

// Affine coefficients of a heat/work quantity over persistence space:
//   value(P, P', P'') = c0 + cP*P + cPp*P' + cPpp*P''
struct PlaneCoefficients {
    double c0 = 0.0, cP = 0.0, cPp = 0.0, cPpp = 0.0;
    double evaluate(const spin::Persistence& pe) const {
        return c0 + cP * pe.P + cPp * pe.Pp + cPpp * pe.Ppp;
    }
};

// Zero-level plane of Q_h, Q_c or W in persistence space; reproduces
// heats() exactly for every triple.
PlaneCoefficients zero_plane(Quantity q, const BathConfig& b, double omega1,
                             double omega2, double J);

}  // namespace qotto::thermo
