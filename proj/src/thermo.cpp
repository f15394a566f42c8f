#include "qotto/thermo.hpp"

#include <cmath>

namespace qotto::thermo {

namespace {

constexpr double kExpLimit = 700.0;  // exp argument ceiling for doubles

void check_exponent(double x) {
    if (std::abs(x) > kExpLimit)
        throw RangeError("thermal exponent " + std::to_string(x) +
                         " overflows double precision (temperature too low)");
}

// weights of the three friction basis terms for one bath/spectrum side:
//   w1 = 1 + e^x/2 - 3 e^-x/2,  w2 = sinh x,  w3 = 3 e^x/2 - e^-x/2 - 1
// with x = beta * hbar * omega; all positive for x > 0.
struct FrictionWeights {
    double w1, w2, w3;
};

FrictionWeights friction_weights(double x) {
    check_exponent(x);
    const double ep = std::exp(x), em = std::exp(-x);
    return {1.0 + ep / 2.0 - 3.0 * em / 2.0, std::sinh(x),
            3.0 * ep / 2.0 - em / 2.0 - 1.0};
}

double friction_sum(const FrictionWeights& w, const spin::Persistence& pe) {
    return w.w1 * (1.0 - pe.P) - w.w2 * (1.0 - pe.Pp) + w.w3 * (1.0 - pe.Ppp);
}

}  // namespace

void BathConfig::validate() const {
    if (!(T_c > 0.0) || !(T_h > T_c))
        throw ConfigError("bath: temperatures must satisfy T_h > T_c > 0");
}

void CycleInputs::validate() const {
    if (!(omega1 > 0.0) || !(omega2 > 0.0))
        throw ConfigError("cycle: endpoint frequencies must be positive");
    if (!std::isfinite(J)) throw ConfigError("cycle: non-finite coupling");
    for (double p : {persistence.P, persistence.Pp, persistence.Ppp})
        if (p < -1e-9 || p > 1.0 + 1e-9)
            throw UnphysicalTriple("cycle: persistence probability outside [0,1]");
    spin::offdiagonals_from_persistence(persistence);
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::engine: return "engine";
        case Regime::refrigerator: return "refrigerator";
        case Regime::accelerator: return "accelerator";
        case Regime::heater: return "heater";
        case Regime::boundary: return "boundary";
    }
    return "boundary";
}

double partition_function(double beta, double omega, double J) {
    if (!(beta > 0.0)) throw ConfigError("partition function: beta must be positive");
    check_exponent(8.0 * J * beta);
    check_exponent(beta * omega);
    return 1.0 + std::exp(8.0 * J * beta) + std::exp(-beta * omega) +
           std::exp(beta * omega);
}

double energy_A(const BathConfig& b, const CycleInputs& in) {
    b.validate();
    in.validate();
    const double bh = b.beta_h();
    const double z1 = partition_function(bh, in.omega1, in.J);
    return -8.0 * in.J * std::exp(8.0 * in.J * bh) / z1 -
           2.0 * in.omega1 * std::sinh(bh * in.omega1) / z1;
}

double energy_C(const BathConfig& b, const CycleInputs& in) {
    b.validate();
    in.validate();
    const double bc = b.beta_c();
    const double z2 = partition_function(bc, in.omega2, in.J);
    return -8.0 * in.J * std::exp(8.0 * in.J * bc) / z2 -
           2.0 * in.omega2 * std::sinh(bc * in.omega2) / z2;
}

double energy_B(const BathConfig& b, const CycleInputs& in) {
    b.validate();
    in.validate();
    const double bh = b.beta_h();
    const double z1 = partition_function(bh, in.omega1, in.J);
    const auto f = friction_weights(bh * in.omega1);
    return -8.0 * in.J * std::exp(8.0 * in.J * bh) / z1 -
           2.0 * in.omega2 * std::sinh(bh * in.omega1) / z1 +
           in.omega2 / z1 * friction_sum(f, in.persistence);
}

double energy_D(const BathConfig& b, const CycleInputs& in) {
    b.validate();
    in.validate();
    const double bc = b.beta_c();
    const double z2 = partition_function(bc, in.omega2, in.J);
    const auto g = friction_weights(bc * in.omega2);
    return -8.0 * in.J * std::exp(8.0 * in.J * bc) / z2 -
           2.0 * in.omega1 * std::sinh(bc * in.omega2) / z2 +
           in.omega1 / z2 * friction_sum(g, in.persistence);
}

CycleReport heats(const BathConfig& b, const CycleInputs& in) {
    b.validate();
    in.validate();
    const double bh = b.beta_h(), bc = b.beta_c();
    const double z1 = partition_function(bh, in.omega1, in.J);
    const double z2 = partition_function(bc, in.omega2, in.J);
    const auto f = friction_weights(bh * in.omega1);
    const auto g = friction_weights(bc * in.omega2);

    CycleReport r;
    r.E_A = energy_A(b, in);
    r.E_B = energy_B(b, in);
    r.E_C = energy_C(b, in);
    r.E_D = energy_D(b, in);

    // leak terms are one expression and its negation, so they cancel in W
    // exactly, not merely to roundoff
    r.Qh_leak = 8.0 * in.J * (std::exp(8.0 * in.J * bc) / z2 -
                              std::exp(8.0 * in.J * bh) / z1);
    r.Qc_leak = -r.Qh_leak;
    r.Qh_ad = in.omega1 * (2.0 * std::sinh(bc * in.omega2) / z2 -
                           2.0 * std::sinh(bh * in.omega1) / z1);
    r.Qc_ad = in.omega2 * (2.0 * std::sinh(bh * in.omega1) / z1 -
                           2.0 * std::sinh(bc * in.omega2) / z2);
    r.Qh_fric = -in.omega1 / z2 * friction_sum(g, in.persistence);
    r.Qc_fric = -in.omega2 / z1 * friction_sum(f, in.persistence);

    r.Q_h = r.Qh_leak + r.Qh_ad + r.Qh_fric;
    r.Q_c = r.Qc_leak + r.Qc_ad + r.Qc_fric;
    r.W = r.Q_h + r.Q_c;
    r.regime = classify_regime(r.Q_h, r.Q_c, r.W);
    if (r.regime == Regime::engine) r.efficiency = r.W / r.Q_h;
    return r;
}

Regime classify_regime(double Q_h, double Q_c, double W) {
    const double scale = std::max({std::abs(Q_h), std::abs(Q_c), 1.0});
    if (std::abs(W - (Q_h + Q_c)) > 1e-12 * scale)
        throw InconsistentEnergies("classify_regime: W != Q_h + Q_c");

    const double tol = 1e-12 * scale;
    if (std::abs(Q_h) < tol || std::abs(Q_c) < tol || std::abs(W) < tol)
        return Regime::boundary;
    if (Q_h > 0.0 && Q_c < 0.0 && W > 0.0) return Regime::engine;
    if (Q_h < 0.0 && Q_c > 0.0 && W < 0.0) return Regime::refrigerator;
    if (Q_h > 0.0 && Q_c < 0.0 && W < 0.0) return Regime::accelerator;
    if (Q_h < 0.0 && Q_c < 0.0 && W < 0.0) return Regime::heater;
    throw InconsistentEnergies(
        "classify_regime: sign pattern violates the second law (both baths "
        "losing heat with positive work)");
}

PlaneCoefficients zero_plane(Quantity q, const BathConfig& b, double omega1,
                             double omega2, double J) {
    b.validate();
    if (!(omega1 > 0.0) || !(omega2 > 0.0))
        throw ConfigError("zero_plane: endpoint frequencies must be positive");
    const double bh = b.beta_h(), bc = b.beta_c();
    const double z1 = partition_function(bh, omega1, J);
    const double z2 = partition_function(bc, omega2, J);
    const auto f = friction_weights(bh * omega1);
    const auto g = friction_weights(bc * omega2);

    const double leak =
        8.0 * J * (std::exp(8.0 * J * bc) / z2 - std::exp(8.0 * J * bh) / z1);
    const double qh_ad = omega1 * (2.0 * std::sinh(bc * omega2) / z2 -
                                   2.0 * std::sinh(bh * omega1) / z1);
    const double qc_ad = omega2 * (2.0 * std::sinh(bh * omega1) / z1 -
                                   2.0 * std::sinh(bc * omega2) / z2);

    // Qh_fric = -(w1/Z)( (1-P)g1 - (1-P')g2 + (1-P'')g3 ) expanded in P's
    PlaneCoefficients qh;
    qh.c0 = leak + qh_ad - omega1 / z2 * (g.w1 - g.w2 + g.w3);
    qh.cP = omega1 / z2 * g.w1;
    qh.cPp = -omega1 / z2 * g.w2;
    qh.cPpp = omega1 / z2 * g.w3;

    PlaneCoefficients qc;
    qc.c0 = -leak + qc_ad - omega2 / z1 * (f.w1 - f.w2 + f.w3);
    qc.cP = omega2 / z1 * f.w1;
    qc.cPp = -omega2 / z1 * f.w2;
    qc.cPpp = omega2 / z1 * f.w3;

    switch (q) {
        case Quantity::Q_h: return qh;
        case Quantity::Q_c: return qc;
        case Quantity::W:
            return {qh.c0 + qc.c0, qh.cP + qc.cP, qh.cPp + qc.cPp,
                    qh.cPpp + qc.cPpp};
    }
    throw ConfigError("zero_plane: unknown quantity");
}

}  // namespace qotto::thermo
