#pragma once

#include <Eigen/Dense>
#include <string>

#include "qotto/algebra.hpp"
#include "qotto/protocol.hpp"
#include "qotto/spin_system.hpp"

// Brute-force reference implementations used to validate the algebraic
// evolution path and the thermal-state energies. By policy this module
// shares only the protocol/field types with the main path: Hamiltonians are
// rebuilt here from two-qubit Pauli products and evolved by dense
// exponentials, with no algebra-core code involved.

namespace qotto::oracle {

using algebra::cplx;

struct DenseOperator {
    Eigen::MatrixXcd mat;
    std::string basis;  // e.g. "singlet-triplet"
};

// Reference evolution operator over a protocol: per-step exact exponential
// of the midpoint-sampled constant Hamiltonian via Hermitian
// eigendecomposition, multiplied in chronological order. Returned in the
// singlet-triplet basis; unitary to 1e-12.
DenseOperator dense_evolve(const protocol::FieldProtocol& p,
                           const spin::CouplingConfig& c, std::int64_t steps);

// Analytic persistence triple of an instantaneous field-direction jump
// (sudden limit): P = P'' = ((1 + cos)/2)^2, P' = cos^2 with cos the angle
// between the two directions.
spin::Persistence sudden_overlap(const Eigen::Vector3d& dir1,
                                 const Eigen::Vector3d& dir2);

// Tr(exp(-beta H) O) / Tr(exp(-beta H)) for Hermitian H, evaluated through
// the eigenbasis with max-shifted exponents.
double thermal_trace(const DenseOperator& H, double beta, const DenseOperator& O);

// Full 4x4 Hamiltonian (field + exchange coupling) at one field sample,
// built from Pauli products and rotated to the singlet-triplet basis.
DenseOperator hamiltonian(const FieldSample& s, const spin::CouplingConfig& c);

// Matrix representations used by tests to check the algebra core against
// direct exponentials and products. The fundamental (2x2) images of a
// composed triple are double valued through the square root of beta; users
// compare them up to that overall sign. The spin-1 images are single
// valued.
namespace rep {

// 2x2 matrices realizing the commutation relations of each algebra.
void fundamental_generators(const algebra::AlgebraKind& alg, Eigen::Matrix2cd& tp,
                            Eigen::Matrix2cd& tc, Eigen::Matrix2cd& tm);

// exp(lambda . T) by Pade scaling-and-squaring (independent of factorize).
Eigen::Matrix2cd fundamental_of_exponent(const algebra::ExponentParams& lam,
                                         const algebra::AlgebraKind& alg);

// exp(L+ T+) exp(ln(Lc) Tc) exp(L- T-) with the principal logarithm.
Eigen::Matrix2cd fundamental_of_factored(const algebra::FactoredParams& f,
                                         const algebra::AlgebraKind& alg);
Eigen::Matrix2cd fundamental_of_composed(const algebra::ComposedParams& c,
                                         const algebra::AlgebraKind& alg);

// spin-1 (3x3) images for su(2); these are single valued in the triple.
Eigen::Matrix3cd triplet_of_exponent(const algebra::ExponentParams& lam);
Eigen::Matrix3cd triplet_of_factored(const algebra::FactoredParams& f);
Eigen::Matrix3cd triplet_of_composed(const algebra::ComposedParams& c);

}  // namespace rep
}  // namespace qotto::oracle
