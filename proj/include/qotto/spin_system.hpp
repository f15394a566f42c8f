#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

#include "qotto/algebra.hpp"
#include "qotto/protocol.hpp"

// Two coupled qubits in a time-varying magnetic field with an isotropic
// exchange interaction. Everything is expressed in the singlet-triplet
// basis, ordered (singlet, |1,+1>, |1,0>, |1,-1>), where the evolution is
// block diagonal: a pure phase on the singlet and an su(2) spin-1 rotation
// on the triplet driven by the external field alone.

namespace qotto::spin {

using algebra::cplx;

// Isotropic exchange coupling strength J (E0). Shifts the singlet level to
// -8J and leaves the triplet untouched.
struct CouplingConfig {
    double J = 0.0;

    bool operator==(const CouplingConfig&) const = default;
};

// (eta_+, eta_c, eta_-) = (X - iY, 2Z, X + iY) for a field sample.
algebra::EtaSample eta_from_field(const FieldSample& s);

// Rabi frequency omega = 2 sqrt(X^2 + Y^2 + Z^2) / hbar (E0/hbar units);
// the instantaneous triplet splittings are {+hbar*omega, 0, -hbar*omega}.
double rabi_frequency(const FieldSample& s);

// Instantaneous eigensystem at one field sample. Levels are labeled by
// value: E1 = -8J (singlet), E2 = +hbar*omega, E3 = 0, E4 = -hbar*omega.
// Column k of `vectors` is the eigenvector of energy[k]; phases are fixed by
// making the largest-magnitude component real positive.
struct EigenSystem {
    double omega = 0.0;
    double J = 0.0;
    std::array<double, 4> energy{};
    Eigen::Matrix4cd vectors;
};

// Throws DegenerateField when omega is numerically zero (triplet eigenbasis
// undefined).
EigenSystem hamiltonian_eigensystem(const FieldSample& s, const CouplingConfig& c,
                                    double tol = 1e-12);

// Discretization control for evolve(): explicit step count, or (steps == 0)
// steps chosen so each step's rotation angle max|eta| * tau_s stays below
// max_step_angle.
struct EvolveOptions {
    std::int64_t steps = 0;
    double max_step_angle = 1e-3;

    bool operator==(const EvolveOptions&) const = default;
};

std::int64_t default_steps(const protocol::FieldProtocol& p,
                           const EvolveOptions& opt);

// Full evolution operator over a protocol.
struct EvolutionResult {
    algebra::ComposedParams composed;  // (alpha, beta, gamma) of the triplet part
    Eigen::Matrix4cd U;                // singlet-triplet basis, block diagonal
    double duration = 0.0;             // protocol duration (t0 units)
};

// Triplet block rebuilt from the composed triple (the closed form of
// exp(alpha T+) diag(beta, 1, 1/beta) exp(gamma T-) in the spin-1
// representation).
Eigen::Matrix3cd triplet_block(const algebra::ComposedParams& p);

// Composes the stepwise external evolution over the protocol (midpoint
// field samples, one exact factorized exponential per step) and attaches
// the coupling-induced singlet phase exp(+8i J dt). Throws NonUnitary when
// the assembled operator deviates from unitarity beyond 1e-8 (discretization
// too coarse).
EvolutionResult evolve(const protocol::FieldProtocol& p, const CouplingConfig& c,
                       const EvolveOptions& opt = {});

struct Persistence {
    double P = 1.0;    // highest triplet level
    double Pp = 1.0;   // zero level
    double Ppp = 1.0;  // lowest triplet level
};

// Off-diagonal probabilities implied by a persistence triple through double
// stochasticity + symmetry of the transition matrix.
struct OffDiagonals {
    double Q = 0.0, Qp = 0.0, Qpp = 0.0;
};

// Transition probabilities p[i][j] = |<E_i(final)| U |E_j(initial)>|^2.
// Symmetric, doubly stochastic, p[0][0] = 1 with a fully decoupled singlet.
struct TransitionMatrix {
    std::array<std::array<double, 4>, 4> p{};
    Persistence persistence;
};

// Builds the transition matrix between the instantaneous eigenbases at the
// protocol endpoints. Verifies symmetry and double stochasticity to 1e-8
// and the persistence/off-diagonal consistency to 1e-9.
TransitionMatrix transition_matrix(const EvolutionResult& U,
                                   const EigenSystem& initial,
                                   const EigenSystem& final_);

// Q   = ( 1 - P - P' + P'')/2
// Q'  = ( 1 - P + P' - P'')/2
// Q'' = ( 1 + P - P' - P'')/2
// Throws UnphysicalTriple when any output leaves [0,1] beyond 1e-9.
OffDiagonals offdiagonals_from_persistence(const Persistence& pe);

}  // namespace qotto::spin
