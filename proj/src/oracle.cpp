#include "qotto/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

namespace qotto::oracle {

namespace {

constexpr cplx kI{0.0, 1.0};

Eigen::Matrix2cd pauli(int i) {
    Eigen::Matrix2cd m;
    switch (i) {
        case 0: m << 0, 1, 1, 0; break;                  // x
        case 1: m << 0, -kI, kI, 0; break;               // y
        default: m << 1, 0, 0, -1; break;                // z
    }
    return m;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

// columns: singlet, |1,+1>, |1,0>, |1,-1> expressed in the computational
// basis (uu, ud, du, dd)
Eigen::Matrix4cd basis_change() {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix4cd b = Eigen::Matrix4cd::Zero();
    b(1, 0) = r;
    b(2, 0) = -r;
    b(0, 1) = 1.0;
    b(1, 2) = r;
    b(2, 2) = r;
    b(3, 3) = 1.0;
    return b;
}

}  // namespace

DenseOperator hamiltonian(const FieldSample& s, const spin::CouplingConfig& c) {
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    const double comp[3] = {s.x, s.y, s.z};
    for (int i = 0; i < 3; ++i) {
        const Eigen::Matrix2cd sig = pauli(i);
        h += comp[i] * (kron2(sig, id) + kron2(id, sig));
        // exchange term 2J (sigma1 . sigma2 - 1)
        h += 2.0 * c.J * kron2(sig, sig);
    }
    h -= 2.0 * c.J * Eigen::Matrix4cd::Identity();
    const Eigen::Matrix4cd b = basis_change();
    return {b.adjoint() * h * b, "singlet-triplet"};
}

DenseOperator dense_evolve(const protocol::FieldProtocol& p,
                           const spin::CouplingConfig& c, std::int64_t steps) {
    p.validate();
    if (steps < 1) throw ConfigError("dense_evolve: steps must be >= 1");

    const double dt_t0 = p.duration() / static_cast<double>(steps);
    const double tau_s = dt_t0 * kT0;
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
    for (std::int64_t j = 0; j < steps; ++j) {
        const double tmid = p.t_start + (static_cast<double>(j) + 0.5) * dt_t0;
        const Eigen::Matrix4cd h = hamiltonian(p.at(tmid), c).mat;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
        if (es.info() != Eigen::Success)
            throw NumericalError("dense_evolve: eigendecomposition failed");
        Eigen::Vector4cd phases;
        for (int k = 0; k < 4; ++k)
            phases[k] = std::exp(-kI * tau_s * es.eigenvalues()[k]);
        u = (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * u)
                .eval();
    }
    return {u, "singlet-triplet"};
}

spin::Persistence sudden_overlap(const Eigen::Vector3d& dir1,
                                 const Eigen::Vector3d& dir2) {
    const double n1 = dir1.norm(), n2 = dir2.norm();
    if (n1 <= 0.0 || n2 <= 0.0)
        throw ConfigError("sudden_overlap: zero direction vector");
    const double c = dir1.dot(dir2) / (n1 * n2);
    const double p = (1.0 + c) / 2.0;
    return {p * p, c * c, p * p};
}

double thermal_trace(const DenseOperator& H, double beta, const DenseOperator& O) {
    if (H.mat.rows() != H.mat.cols() || O.mat.rows() != O.mat.cols() ||
        H.mat.rows() != O.mat.rows())
        throw ConfigError("thermal_trace: dimension mismatch");
    if ((H.mat - H.mat.adjoint()).norm() > 1e-12 * std::max(1.0, H.mat.norm()))
        throw NumericalError("thermal_trace: Hamiltonian not Hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.mat);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double emin = ev.minCoeff();
    if (std::abs(beta * (ev.maxCoeff() - emin)) > 700.0)
        throw RangeError("thermal_trace: exponent overflow");

    const Eigen::MatrixXcd o_eig =
        es.eigenvectors().adjoint() * O.mat * es.eigenvectors();
    double z = 0.0, acc = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        const double w = std::exp(-beta * (ev[k] - emin));
        z += w;
        acc += w * std::real(o_eig(k, k));
    }
    return acc / z;
}

namespace rep {

void fundamental_generators(const algebra::AlgebraKind& alg, Eigen::Matrix2cd& tp,
                            Eigen::Matrix2cd& tc, Eigen::Matrix2cd& tm) {
    tp << 0, 1, 0, 0;
    if (alg.name() == "su2") {
        tc << 0.5, 0, 0, -0.5;
        tm << 0, 0, 1, 0;
    } else if (alg.name() == "su11") {
        tc << 0.5, 0, 0, -0.5;
        tm << 0, 0, -1, 0;
    } else {  // so21
        tc << 0.5 * kI, 0, 0, -0.5 * kI;
        tm << 0, 0, 0.5, 0;
    }
}

Eigen::Matrix2cd fundamental_of_exponent(const algebra::ExponentParams& lam,
                                         const algebra::AlgebraKind& alg) {
    Eigen::Matrix2cd tp, tc, tm;
    fundamental_generators(alg, tp, tc, tm);
    return (lam.plus * tp + lam.c * tc + lam.minus * tm).exp();
}

Eigen::Matrix2cd fundamental_of_factored(const algebra::FactoredParams& f,
                                         const algebra::AlgebraKind& alg) {
    Eigen::Matrix2cd tp, tc, tm;
    fundamental_generators(alg, tp, tc, tm);
    const cplx lnc = std::log(f.c);
    Eigen::Matrix2cd mid = Eigen::Matrix2cd::Zero();
    mid(0, 0) = std::exp(lnc * tc(0, 0));
    mid(1, 1) = std::exp(lnc * tc(1, 1));
    return (f.plus * tp).exp() * mid * (f.minus * tm).exp();
}

Eigen::Matrix2cd fundamental_of_composed(const algebra::ComposedParams& c,
                                         const algebra::AlgebraKind& alg) {
    return fundamental_of_factored(algebra::as_factored(c), alg);
}

Eigen::Matrix3cd triplet_of_exponent(const algebra::ExponentParams& lam) {
    const double s2 = std::sqrt(2.0);
    Eigen::Matrix3cd tp, tc, tm;
    tp << 0, s2, 0, 0, 0, s2, 0, 0, 0;
    tm = tp.transpose();
    tc = Eigen::Vector3cd(1.0, 0.0, -1.0).asDiagonal();
    return (lam.plus * tp + lam.c * tc + lam.minus * tm).exp();
}

Eigen::Matrix3cd triplet_of_factored(const algebra::FactoredParams& f) {
    const double s2 = std::sqrt(2.0);
    Eigen::Matrix3cd tp, tm;
    tp << 0, s2, 0, 0, 0, s2, 0, 0, 0;
    tm = tp.transpose();
    const Eigen::Matrix3cd mid =
        Eigen::Vector3cd(f.c, 1.0, 1.0 / f.c).asDiagonal();
    return (f.plus * tp).exp() * mid * (f.minus * tm).exp();
}

Eigen::Matrix3cd triplet_of_composed(const algebra::ComposedParams& c) {
    return triplet_of_factored(algebra::as_factored(c));
}

}  // namespace rep
}  // namespace qotto::oracle
