#include "qotto/spin_system.hpp"

#include <cmath>
#include <vector>

namespace qotto::spin {

namespace {

constexpr cplx kI{0.0, 1.0};

// spin-1 generators in the triplet basis: Tc = diag(1,0,-1),
// T+ = sqrt(2) * (upper shift), T- = (T+)^dagger
const double kSqrt2 = std::sqrt(2.0);

Eigen::Matrix3cd triplet_hamiltonian(const FieldSample& s) {
    const auto eta = eta_from_field(s);
    Eigen::Matrix3cd h;
    h << eta.c, kSqrt2 * eta.plus, 0.0,
         kSqrt2 * eta.minus, 0.0, kSqrt2 * eta.plus,
         0.0, kSqrt2 * eta.minus, -eta.c;
    return h;
}

void fix_phase(Eigen::Vector3cd& v) {
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const cplx a = v[imax];
    if (std::abs(a) > 0.0) v *= std::conj(a) / std::abs(a);
}

}  // namespace

algebra::EtaSample eta_from_field(const FieldSample& s) {
    return {cplx(s.x, -s.y), cplx(2.0 * s.z, 0.0), cplx(s.x, s.y)};
}

double rabi_frequency(const FieldSample& s) {
    return 2.0 * std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z);
}

EigenSystem hamiltonian_eigensystem(const FieldSample& s, const CouplingConfig& c,
                                    double tol) {
    const double omega = rabi_frequency(s);
    if (omega <= tol)
        throw DegenerateField("eigensystem: zero driving field, triplet basis undefined");

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(triplet_hamiltonian(s));
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigensystem: diagonalization failed");

    // ascending (-omega, 0, +omega) -> labels (E4, E3, E2)
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    const std::array<double, 3> expected{omega, 0.0, -omega};
    const std::array<int, 3> col{2, 1, 0};

    EigenSystem out;
    out.omega = omega;
    out.J = c.J;
    out.energy = {-8.0 * c.J, omega, 0.0, -omega};
    out.vectors.setZero();
    out.vectors(0, 0) = 1.0;
    for (int k = 0; k < 3; ++k) {
        if (std::abs(vals[col[k]] - expected[k]) > 1e-9 * omega)
            throw NumericalError("eigensystem: triplet eigenvalue off its label");
        Eigen::Vector3cd v = vecs.col(col[k]);
        fix_phase(v);
        out.vectors.block<3, 1>(1, 1 + k) = v;
    }
    return out;
}

std::int64_t default_steps(const protocol::FieldProtocol& p, const EvolveOptions& opt) {
    if (opt.steps > 0) return opt.steps;
    double eta_max = 0.0;
    for (const auto& s : p.samples) eta_max = std::max(eta_max, rabi_frequency(s));
    const double duration = p.duration() * kT0;
    const double n = std::ceil(duration * std::max(eta_max, 1e-6) / opt.max_step_angle);
    if (!(n < 2e9))
        throw ConfigError("discretization: step-angle bound asks for more than 2e9 steps");
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(n));
}

Eigen::Matrix3cd triplet_block(const algebra::ComposedParams& p) {
    const cplx a = p.alpha, b = p.beta, g = p.gamma;
    const cplx agb = a * g + b;
    Eigen::Matrix3cd m;
    m << agb * agb / b, kSqrt2 * a * agb / b, a * a / b,
         kSqrt2 * g * agb / b, 2.0 * a * g / b + 1.0, kSqrt2 * a / b,
         g * g / b, kSqrt2 * g / b, 1.0 / b;
    return m;
}

namespace {

// Fixed unitary gauge element seeding the composition chain. Y-free drives
// make the bare running coordinates sweep tangentially through their
// singular surface twice per revolution about the transverse axis, which
// poisons the accumulated precision; composing onto a generic rotation
// keeps the running product clear of that surface, and the inverse is
// stripped off after the last step.
const algebra::ExponentParams kGaugeExponent{
    cplx(0.21, -0.37), cplx(0.0, -0.53), cplx(-0.21, -0.37)};

}  // namespace

EvolutionResult evolve(const protocol::FieldProtocol& p, const CouplingConfig& c,
                       const EvolveOptions& opt) {
    p.validate();
    const std::int64_t n = default_steps(p, opt);
    const double dt_t0 = p.duration() / static_cast<double>(n);
    const double tau_s = dt_t0 * kT0;  // internal time step

    const auto su2 = algebra::AlgebraKind::su2();
    const auto gauge = algebra::factorize(kGaugeExponent, su2);
    const auto gauge_inv = algebra::factorize(
        {-kGaugeExponent.plus, -kGaugeExponent.c, -kGaugeExponent.minus}, su2);

    // stream the midpoint samples through the assembler in chunks, chaining
    // each chunk off the previous accumulated element
    constexpr std::int64_t kChunk = 1 << 16;
    std::vector<algebra::EtaSample> etas;
    etas.reserve(static_cast<std::size_t>(std::min(n, kChunk)));
    auto seeded = algebra::as_composed(gauge);
    for (std::int64_t base = 0; base < n; base += kChunk) {
        const std::int64_t count = std::min(kChunk, n - base);
        etas.clear();
        for (std::int64_t j = base; j < base + count; ++j) {
            const double tmid = p.t_start + (static_cast<double>(j) + 0.5) * dt_t0;
            etas.push_back(eta_from_field(p.at(tmid)));
        }
        try {
            seeded = algebra::assemble_stepwise(etas, tau_s, su2,
                                                algebra::as_factored(seeded));
        } catch (const CompositionSingularity& e) {
            throw CompositionSingularity(
                std::string(e.what()) + " (chunk offset " + std::to_string(base) + ")",
                e.index >= 0 ? e.index + base : e.index);
        } catch (const DegenerateFactorization& e) {
            throw DegenerateFactorization(std::string(e.what()) + " (chunk offset " +
                                          std::to_string(base) + ")");
        }
    }
    const auto composed =
        algebra::compose_pair(algebra::as_factored(seeded), gauge_inv, su2);

    EvolutionResult out;
    out.composed = composed;
    out.duration = p.duration();
    out.U.setZero();
    // exchange coupling commutes with the driving; it only phases the singlet
    out.U(0, 0) = std::exp(kI * 8.0 * c.J * p.duration() * kT0);
    out.U.block<3, 3>(1, 1) = triplet_block(composed);

    const double dev = (out.U.adjoint() * out.U - Eigen::Matrix4cd::Identity()).norm();
    if (dev > 1e-8)
        throw NonUnitary("evolve: assembled operator non-unitary (" +
                         std::to_string(dev) + "); refine the discretization");
    return out;
}

TransitionMatrix transition_matrix(const EvolutionResult& U, const EigenSystem& initial,
                                   const EigenSystem& final_) {
    // the singlet is exactly decoupled, so its row/column is analytic;
    // the triplet block carries all the dynamics
    const Eigen::Matrix3cd vi = initial.vectors.block<3, 3>(1, 1);
    const Eigen::Matrix3cd vf = final_.vectors.block<3, 3>(1, 1);
    const Eigen::Matrix3cd amp = vf.adjoint() * U.U.block<3, 3>(1, 1) * vi;

    TransitionMatrix out;
    out.p[0][0] = 1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.p[i + 1][j + 1] = std::norm(amp(i, j));

    for (int i = 0; i < 4; ++i) {
        double row = 0.0, col = 0.0;
        for (int j = 0; j < 4; ++j) {
            row += out.p[i][j];
            col += out.p[j][i];
        }
        if (std::abs(row - 1.0) > 1e-8 || std::abs(col - 1.0) > 1e-8)
            throw StochasticityViolation(
                "transition matrix: row/column sum deviates from 1 beyond 1e-8");
        for (int j = 0; j < i; ++j)
            if (std::abs(out.p[i][j] - out.p[j][i]) > 1e-8)
                throw StochasticityViolation(
                    "transition matrix: symmetry violated beyond 1e-8");
    }

    out.persistence = {out.p[1][1], out.p[2][2], out.p[3][3]};
    const auto q = offdiagonals_from_persistence(out.persistence);
    if (std::abs(out.p[1][2] - q.Q) > 1e-9 || std::abs(out.p[1][3] - q.Qp) > 1e-9 ||
        std::abs(out.p[2][3] - q.Qpp) > 1e-9)
        throw StochasticityViolation(
            "transition matrix: off-diagonals inconsistent with persistence triple");
    return out;
}

OffDiagonals offdiagonals_from_persistence(const Persistence& pe) {
    OffDiagonals q;
    q.Q = 0.5 * (1.0 - pe.P - pe.Pp + pe.Ppp);
    q.Qp = 0.5 * (1.0 - pe.P + pe.Pp - pe.Ppp);
    q.Qpp = 0.5 * (1.0 + pe.P - pe.Pp - pe.Ppp);
    for (double v : {q.Q, q.Qp, q.Qpp}) {
        if (v < -1e-9 || v > 1.0 + 1e-9)
            throw UnphysicalTriple(
                "persistence triple implies an off-diagonal probability outside [0,1]");
    }
    return q;
}

}  // namespace qotto::spin
