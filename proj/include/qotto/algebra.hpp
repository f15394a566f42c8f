#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qotto/errors.hpp"

// Gauss (BCH-like) factorization and composition of group elements of the
// su(2) / su(1,1) / so(2,1) Lie algebras, treated uniformly through the
// structure-constant pair (delta, epsilon):
//
//   [T-, T+] = 2 epsilon Tc,   [Tc, T+-] = +- delta T+-
//
// A group element written as a single exponential
//   G = exp(lambda_+ T+ + lambda_c Tc + lambda_- T-)
// factorizes into the ordered product
//   G = exp(Lambda_+ T+) exp(ln(Lambda_c) Tc) exp(Lambda_- T-),
// and products of factorized elements compose by closed-form recurrences.
// Chaining the per-step factorizations of a stepwise-constant Hamiltonian
// yields the time-evolution operator of the driven system.

namespace qotto::algebra {

using cplx = std::complex<double>;

// Structure-constant pair selecting one of the three supported algebras.
class AlgebraKind {
  public:
    static AlgebraKind su2() { return AlgebraKind(1.0, -1.0, "su2"); }
    static AlgebraKind su11() { return AlgebraKind(1.0, 1.0, "su11"); }
    static AlgebraKind so21() {
        return AlgebraKind(cplx(0.0, 1.0), cplx(0.0, 0.5), "so21");
    }
    static AlgebraKind from_name(const std::string& name);

    cplx delta() const { return delta_; }
    cplx epsilon() const { return epsilon_; }
    const std::string& name() const { return name_; }

    // true for su(2)/su(1,1), where z^delta and z^(2/delta) need no complex
    // powers
    bool real_delta() const { return delta_ == cplx(1.0, 0.0); }

  private:
    AlgebraKind(cplx d, cplx e, std::string n)
        : delta_(d), epsilon_(e), name_(std::move(n)) {}
    cplx delta_, epsilon_;
    std::string name_;
};

// Exponent coefficients of a single-exponential group element.
struct ExponentParams {
    cplx plus{}, c{}, minus{};
};

// Coefficients of the factorized (Gauss) form; `c` is Lambda_c itself, the
// middle exponent of the product being ln(Lambda_c).
struct FactoredParams {
    cplx plus{}, c{1.0, 0.0}, minus{};
};

// Result of composing one or more factorized elements: the (alpha, beta,
// gamma) triple of the product in the same Gauss-ordered form.
struct ComposedParams {
    cplx alpha{}, beta{1.0, 0.0}, gamma{};
};

inline FactoredParams identity_element() { return FactoredParams{}; }

// A factorized/composed triple is itself a valid Gauss form, so the two
// parameter types convert freely.
inline ComposedParams as_composed(const FactoredParams& f) {
    return ComposedParams{f.plus, f.c, f.minus};
}
inline FactoredParams as_factored(const ComposedParams& c) {
    return FactoredParams{c.alpha, c.beta, c.gamma};
}

// One Hamiltonian sample eta = (eta_+, eta_c, eta_-), energy units.
struct EtaSample {
    cplx plus{}, c{}, minus{};
};

// Relative tolerance against which near-vanishing denominators are flagged.
inline constexpr double kSingularTol = 1e-12;

// Exponent magnitude beyond which a chain emits a one-shot diagnostic
// warning on stderr (non-compact algebras can grow without bound).
inline constexpr double kMagnitudeWarnThreshold = 1e12;

// Gauss factorization of a single exponential.
//
// With nu^2 = (delta lambda_c / 2)^2 - delta epsilon lambda_+ lambda_-,
//   base    = cosh(nu) - (delta lambda_c / 2) sinh(nu)/nu
//   Lambda_c  = base^(-2/delta)
//   Lambda_+- = lambda_+- (sinh(nu)/nu) / base
// Both cosh(nu) and sinh(nu)/nu are even, so the result does not depend on
// the branch of the square root; near nu = 0 they are evaluated by series.
// Throws DegenerateFactorization when |base| falls below tolerance (the
// Gauss coordinates have a coordinate singularity there).
FactoredParams factorize(const ExponentParams& lam, const AlgebraKind& alg,
                         double tol = kSingularTol);

// Applies one more factorized element on the left of an accumulated product:
// returns the triple of G(next) G(acc).
ComposedParams compose_apply(const ComposedParams& acc,
                             const FactoredParams& next,
                             const AlgebraKind& alg,
                             double tol = kSingularTol);

// Composition of two factorized elements, G(second) G(first); `second` acts
// later (stands to the left in the operator product).
ComposedParams compose_pair(const FactoredParams& second,
                            const FactoredParams& first,
                            const AlgebraKind& alg,
                            double tol = kSingularTol);

// Composition of N elements; index increases with application order, so
// elems.back() is applied last (leftmost in the operator product).
// CompositionSingularity carries the index of the offending element.
ComposedParams compose_chain(std::span<const FactoredParams> elems,
                             const AlgebraKind& alg,
                             double tol = kSingularTol);

// The alpha coefficient of compose_chain evaluated independently through the
// generalized continued fraction, using the Euler-Wallis convergent
// recurrence. Agrees with compose_chain(...).alpha wherever both are
// defined; kept as a separate arithmetic route for cross-checking.
cplx alpha_continued_fraction(std::span<const FactoredParams> elems,
                              const AlgebraKind& alg,
                              double tol = kSingularTol);

// Stepwise time evolution: for each sample eta_j of a piecewise-constant
// Hamiltonian H_j = eta_j . T held for duration `step` (time units with
// hbar = 1), factorizes U_j = exp(-i step eta_j . T) and composes the chain
// in chronological order. A step that lands on a factorization or
// composition singularity is retried once as two half-steps before the
// error (annotated with the step index) propagates.
//
// A caller may seed the chain with a fixed group element G0, obtaining the
// coordinates of U(t,t0) G0 instead. Drives with a real matrix structure
// (transverse field, no y component) sweep the bare coordinates through
// their singular surface twice per revolution; a generic unitary seed moves
// the running product off that surface, and one final composition with
// G0^{-1} recovers U itself at full precision.
ComposedParams assemble_stepwise(std::span<const EtaSample> etas, double step,
                                 const AlgebraKind& alg,
                                 double tol = kSingularTol);
ComposedParams assemble_stepwise(std::span<const EtaSample> etas, double step,
                                 const AlgebraKind& alg, const FactoredParams& seed,
                                 double tol = kSingularTol);

namespace detail {

// factorize with an explicitly chosen square-root branch for nu;
// branch = +1 or -1. Exposed so tests can assert branch invariance.
FactoredParams factorize_branch(const ExponentParams& lam,
                                const AlgebraKind& alg, int branch,
                                double tol);

// z^delta and z^(2/delta) with the principal complex power for so(2,1).
cplx pow_delta(cplx z, const AlgebraKind& alg);
cplx pow_two_over_delta(cplx z, const AlgebraKind& alg);

}  // namespace detail

}  // namespace qotto::algebra
