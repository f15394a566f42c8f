#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qotto/oracle.hpp"
#include "qotto/protocol.hpp"
#include "qotto/spin_system.hpp"

using namespace qotto;
using algebra::cplx;
using spin::CouplingConfig;

namespace {

protocol::TanhSweepConfig fig_sweep(double tau) {
    protocol::TanhSweepConfig cfg;  // delta=1, u_i=2, u_f=0, window [0,20]
    cfg.tau = tau;
    return cfg;
}

}  // namespace

TEST_CASE("eta components from a field sample") {
    const auto a = spin::eta_from_field({1.0, 0.0, 0.0, 0.0});
    CHECK(a.plus == cplx(1.0, 0.0));
    CHECK(a.c == cplx(0.0, 0.0));
    CHECK(a.minus == cplx(1.0, 0.0));

    const auto b = spin::eta_from_field({0.0, 0.0, 2.0, 0.0});
    CHECK(b.plus == cplx(0.0, 0.0));
    CHECK(b.c == cplx(4.0, 0.0));
    CHECK(b.minus == cplx(0.0, 0.0));

    const auto c = spin::eta_from_field({1.0, 1.0, 0.0, 0.0});
    CHECK(c.plus == cplx(1.0, -1.0));
    CHECK(c.c == cplx(0.0, 0.0));
    CHECK(c.minus == cplx(1.0, 1.0));
}

TEST_CASE("Rabi frequency of field samples") {
    CHECK(spin::rabi_frequency({1.0, 0.0, 2.0, 0.0}) ==
          doctest::Approx(2.0 * std::sqrt(5.0)).epsilon(1e-15));
    CHECK(spin::rabi_frequency({0.0, 0.0, 0.0, 0.0}) == 0.0);
    CHECK(spin::rabi_frequency({1.0, 0.0, 0.0, 0.0}) == doctest::Approx(2.0));
}

TEST_CASE("eigensystem: longitudinal field is diagonal") {
    const auto es = spin::hamiltonian_eigensystem({0.0, 0.0, 1.5, 0.0}, {0.25});
    CHECK(es.energy[0] == doctest::Approx(-2.0));  // singlet at -8J
    CHECK(es.energy[1] == doctest::Approx(3.0));   // +2u
    CHECK(es.energy[2] == doctest::Approx(0.0));
    CHECK(es.energy[3] == doctest::Approx(-3.0));
    // canonical triplet basis, phases real positive
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(es.vectors(k, k) - 1.0) < 1e-12);
        for (int j = 0; j < 4; ++j)
            if (j != k) CHECK(std::abs(es.vectors(j, k)) < 1e-12);
    }
}

TEST_CASE("eigensystem: transverse field is the rotated triplet") {
    const double delta = 0.8;
    const auto es = spin::hamiltonian_eigensystem({delta, 0.0, 0.0, 0.0}, {});
    CHECK(es.energy[1] == doctest::Approx(2.0 * delta));
    // top eigenvector of the x-aligned spin-1 field: (1/2, 1/sqrt2, 1/2)
    CHECK(std::abs(es.vectors(1, 1) - 0.5) < 1e-12);
    CHECK(std::abs(es.vectors(2, 1) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(es.vectors(3, 1) - 0.5) < 1e-12);
}

TEST_CASE("eigensystem: figure parameter point") {
    const auto es = spin::hamiltonian_eigensystem({1.0, 0.0, 2.0, 0.0}, {0.125});
    CHECK(es.energy[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(es.energy[1] == doctest::Approx(2.0 * std::sqrt(5.0)).epsilon(1e-14));
    CHECK(es.energy[2] == doctest::Approx(0.0));
    CHECK(es.energy[3] == doctest::Approx(-2.0 * std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("evolve: constant field matches the dense exponential, persistence 1") {
    std::vector<FieldSample> table{{0.6, 0.0, 1.1, 0.0}, {0.6, 0.0, 1.1, 2.5}};
    const auto p = protocol::from_samples(table);
    const CouplingConfig c{0.2};
    const auto u = spin::evolve(p, c, {4000, 1e-3});
    const auto dense = oracle::dense_evolve(p, c, 1);
    CHECK((u.U - dense.mat).norm() < 1e-9);

    const auto es = spin::hamiltonian_eigensystem(table[0], c);
    const auto tm = spin::transition_matrix(u, es, es);
    CHECK(tm.persistence.P == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(tm.persistence.Pp == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(tm.persistence.Ppp == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("evolve: unitary, block structure, coupling only phases the singlet") {
    const auto p = protocol::tanh_sweep(fig_sweep(0.5), 257);
    const auto u0 = spin::evolve(p, {0.0}, {20000, 1e-3});
    const auto u3 = spin::evolve(p, {0.3}, {20000, 1e-3});

    CHECK((u0.U.adjoint() * u0.U - Eigen::Matrix4cd::Identity()).norm() < 1e-10);
    CHECK(std::abs(std::abs(u0.U(0, 0)) - 1.0) < 1e-14);
    for (int k = 1; k < 4; ++k) {
        CHECK(u0.U(0, k) == cplx(0.0, 0.0));
        CHECK(u0.U(k, 0) == cplx(0.0, 0.0));
    }
    // triplet blocks bit-identical across couplings
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 4; ++j) CHECK(u0.U(i, j) == u3.U(i, j));
    // singlet phase carries the coupling
    const double phase = 8.0 * 0.3 * u3.duration * kT0;
    CHECK(std::abs(u3.U(0, 0) - std::exp(cplx(0.0, 1.0) * phase)) < 1e-9);
}

TEST_CASE("evolve: triplet block equals the explicit generator product") {
    const auto p = protocol::tanh_sweep(fig_sweep(0.3), 257);
    const auto u = spin::evolve(p, {}, {10000, 1e-3});
    const Eigen::Matrix3cd direct = oracle::rep::triplet_of_composed(u.composed);
    CHECK((u.U.block<3, 3>(1, 1) - direct).norm() < 1e-12);
}

TEST_CASE("transition matrix: identity evolution on matching endpoints") {
    std::vector<FieldSample> table{{0.4, 0.0, 0.9, 0.0}, {0.4, 0.0, 0.9, 1.0}};
    const auto p = protocol::from_samples(table);
    spin::EvolutionResult u;
    u.U.setIdentity();
    u.duration = 0.0;
    const auto es = spin::hamiltonian_eigensystem(table[0], {});
    const auto tm = spin::transition_matrix(u, es, es);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(tm.p[i][j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("transition matrix: sudden quench against the analytic overlap") {
    // directions (1,0,2)/sqrt5 -> (1,0,0) swept fast inside a short window
    const double s5 = std::sqrt(5.0);
    protocol::TanhSweepConfig cfg;
    cfg.delta = 1.0 / s5;
    cfg.u_i = 2.0 / s5;
    cfg.u_f = 0.0;
    cfg.t1 = 0.0;
    cfg.t2 = 2e-3;
    cfg.tau = 1e-4;
    const auto p = protocol::tanh_sweep(cfg, 257);
    const auto u = spin::evolve(p, {}, {20000, 1e-3});
    const auto tm = spin::transition_matrix(
        u, spin::hamiltonian_eigensystem(p.samples.front(), {}),
        spin::hamiltonian_eigensystem(p.samples.back(), {}));

    const auto expect = oracle::sudden_overlap({1.0, 0.0, 2.0}, {1.0, 0.0, 0.0});
    CHECK(tm.persistence.P == doctest::Approx(expect.P).epsilon(2e-4));
    CHECK(tm.persistence.Pp == doctest::Approx(expect.Pp).epsilon(2e-4));
    CHECK(tm.persistence.Ppp == doctest::Approx(expect.Ppp).epsilon(2e-4));
    CHECK(expect.P == doctest::Approx(0.5236067977499790).epsilon(1e-15));
    CHECK(expect.Pp == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("transition matrix: symmetric, doubly stochastic, J independent") {
    const auto p = protocol::tanh_sweep(fig_sweep(0.4), 257);
    const auto run = [&](double J) {
        const CouplingConfig c{J};
        const auto u = spin::evolve(p, c, {20000, 1e-3});
        return spin::transition_matrix(
            u, spin::hamiltonian_eigensystem(p.samples.front(), c),
            spin::hamiltonian_eigensystem(p.samples.back(), c));
    };
    const auto tm = run(0.0);
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) {
            row += tm.p[i][j];
            CHECK(std::abs(tm.p[i][j] - tm.p[j][i]) < 1e-10);
        }
        CHECK(row == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(tm.p[0][0] == 1.0);

    const auto tm2 = run(0.3);
    CHECK(tm2.persistence.P == doctest::Approx(tm.persistence.P).epsilon(1e-12));
    CHECK(tm2.persistence.Pp == doctest::Approx(tm.persistence.Pp).epsilon(1e-12));
    CHECK(tm2.persistence.Ppp == doctest::Approx(tm.persistence.Ppp).epsilon(1e-12));
}

TEST_CASE("transition matrix: reversed sweep keeps the persistence triple") {
    const auto run = [&](double ui, double uf) {
        protocol::TanhSweepConfig cfg = fig_sweep(0.15);
        cfg.u_i = ui;
        cfg.u_f = uf;
        const auto p = protocol::tanh_sweep(cfg, 257);
        const auto u = spin::evolve(p, {}, {40000, 1e-3});
        return spin::transition_matrix(
                   u, spin::hamiltonian_eigensystem(p.samples.front(), {}),
                   spin::hamiltonian_eigensystem(p.samples.back(), {}))
            .persistence;
    };
    const auto fwd = run(2.0, 0.0);
    const auto bwd = run(0.0, 2.0);
    CHECK(fwd.P == doctest::Approx(bwd.P).epsilon(1e-9));
    CHECK(fwd.Pp == doctest::Approx(bwd.Pp).epsilon(1e-9));
    CHECK(fwd.Ppp == doctest::Approx(bwd.Ppp).epsilon(1e-9));
}

TEST_CASE("transition matrix: near-adiabatic sweep pins the diagonal") {
    const auto p = protocol::tanh_sweep(fig_sweep(10.0), 257);
    const auto u = spin::evolve(p, {}, {200000, 1e-3});
    const auto tm = spin::transition_matrix(
        u, spin::hamiltonian_eigensystem(p.samples.front(), {}),
        spin::hamiltonian_eigensystem(p.samples.back(), {}));
    CHECK(std::abs(tm.persistence.P - 1.0) < 1e-2);
    CHECK(std::abs(tm.persistence.Pp - 1.0) < 1e-2);
    CHECK(std::abs(tm.persistence.Ppp - 1.0) < 1e-2);
}

TEST_CASE("off-diagonals from persistence") {
    const auto ad = spin::offdiagonals_from_persistence({1.0, 1.0, 1.0});
    CHECK(ad.Q == 0.0);
    CHECK(ad.Qp == 0.0);
    CHECK(ad.Qpp == 0.0);

    const auto q = spin::offdiagonals_from_persistence({0.5236, 0.2, 0.5236});
    CHECK(q.Q == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(q.Qp == doctest::Approx(0.0764).epsilon(1e-12));
    CHECK(q.Qpp == doctest::Approx(0.4).epsilon(1e-12));

    // a triple no unitary can realize: the implied off-diagonal leaves [0,1]
    CHECK_THROWS_AS(spin::offdiagonals_from_persistence({1.0, 0.0, 1.0}),
                    UnphysicalTriple);
}

TEST_CASE("evolve raises on protocols landing on the triplet swap element") {
    // constant transverse field held for a quarter turn: the final operator
    // exchanges the extreme triplet states, where the Gauss coordinates blow
    // up; the assembler must fail loudly rather than return garbage
    std::vector<FieldSample> table{{1.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.25}};
    const auto p = protocol::from_samples(table);
    CHECK_THROWS_AS(spin::evolve(p, {}, {1000, 1e-3}), NumericalError);
}

TEST_CASE("evolve refuses absurd discretization demands") {
    std::vector<FieldSample> table{{1.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 1e9}};
    const auto p = protocol::from_samples(table);
    CHECK_THROWS_AS(spin::evolve(p, {}, {0, 1e-6}), ConfigError);
}
