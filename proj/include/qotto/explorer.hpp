#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qotto/protocol.hpp"
#include "qotto/spin_system.hpp"
#include "qotto/thermo.hpp"

// Parameter exploration: persistence trajectories versus the adiabatic
// parameter, grid sweeps with full cycle reports, heat-leak maps, and
// derivative-free maximization of work or efficiency.
//
// Grid points are independent tasks and may be evaluated concurrently, but
// results always assemble in deterministic (lexicographic) order, so the
// emitted tables are byte-identical for any worker count.

namespace qotto::explorer {

enum class AxisName { J, tau, omega_ratio, T_h };
std::string to_string(AxisName a);
AxisName axis_from_name(const std::string& name);

struct AxisSpec {
    AxisName name = AxisName::J;
    double lo = 0.0;
    double hi = 0.0;
    int count = 2;

    std::vector<double> values() const;
    void validate() const;

    bool operator==(const AxisSpec&) const = default;
};

enum class Objective { none, work, efficiency };

// Fixed cycle parameters plus the swept axes. The driving protocol is the
// constant-transverse / tanh-longitudinal sweep whose amplitudes follow
// from the requested endpoint splittings: u_f = 0, Delta = homega2/2,
// u_i = sqrt(homega1^2 - homega2^2)/2.
struct SweepSpec {
    double homega1 = 4.0;      // hbar*omega_1 (E0), held fixed
    double omega_ratio = 0.5;  // omega_2/omega_1 when not swept
    double T_h = 1.0;          // kB*T_h (E0) when not swept
    double Tc_over_Th = 0.5;   // bath temperature ratio, held fixed
    double J = 0.0;            // coupling (E0) when not swept
    double tau = 1.0;          // adiabatic parameter when not swept
    bool adiabatic = false;    // persistence pinned at (1,1,1), no evolution
    double window_t1 = 0.0;    // sweep window (t0 units, widened for large tau)
    double window_t2 = 20.0;
    spin::EvolveOptions evolve;
    std::vector<AxisSpec> axes;
    Objective objective = Objective::none;
    int workers = 0;  // 0 = hardware concurrency

    void validate() const;

    bool operator==(const SweepSpec&) const = default;
};

protocol::TanhSweepConfig sweep_protocol(double homega1, double omega_ratio,
                                         double t1, double t2, double tau);

// Persistence triple of one tanh sweep (coupling independent: the exchange
// term only phases the decoupled singlet).
spin::Persistence protocol_persistence(const protocol::TanhSweepConfig& cfg,
                                       const spin::EvolveOptions& opt = {});

struct TrajectoryPoint {
    double tau = 0.0;
    spin::Persistence persistence;
    thermo::Regime regime = thermo::Regime::boundary;
    double Q_h = 0.0, Q_c = 0.0, W = 0.0;
};

// Persistence-space trajectory of the sweep versus the adiabatic parameter,
// classified against the given baths. The persistence triples themselves do
// not depend on the bath temperatures.
std::vector<TrajectoryPoint> tau_trajectory(const protocol::TanhSweepConfig& base,
                                            const spin::CouplingConfig& c,
                                            const thermo::BathConfig& bath,
                                            std::span<const double> tau_values,
                                            const spin::EvolveOptions& opt = {},
                                            int workers = 0);

struct SweepRecord {
    std::vector<double> axis_values;
    spin::Persistence persistence;
    thermo::CycleReport report;
    std::string error;  // empty on success; failed points keep their row
};

struct SweepTable {
    std::vector<AxisSpec> axes;
    std::vector<SweepRecord> records;  // lexicographic in axis order
};

SweepTable grid_sweep(const SweepSpec& spec);

struct LeakRecord {
    double J = 0.0, tau = 0.0, Qh_leak = 0.0;
    bool leak_negative = false;  // heat flowing cold -> hot
    thermo::Regime regime = thermo::Regime::boundary;
};

// Coupling-induced leak term over a (J, tau) grid. The leak itself carries
// no persistence dependence, so it is constant along tau; the per-cell
// regime still varies.
std::vector<LeakRecord> heat_leak_map(const SweepSpec& spec);

struct MaximizeResult {
    std::vector<std::pair<AxisName, double>> argmax;
    double value = 0.0;
    spin::Persistence persistence;
    thermo::CycleReport report;
};

// Coarse grid scan over the axes followed by simplex (Nelder-Mead)
// refinement with coordinates projected into the axis ranges; efficiency
// maximization additionally restricts to engine-regime points and enforces
// 8J < homega2. Throws NoEngineRegion when the efficiency objective finds
// no engine point on the coarse grid.
MaximizeResult maximize(const SweepSpec& spec);

// CSV emitters: one header row, 17-significant-digit numbers, LF endings.
std::string sweep_csv(const SweepTable& table);
std::string leak_csv(const std::vector<LeakRecord>& records);
std::string trajectory_csv(const std::vector<TrajectoryPoint>& points);

// "%.17g" rendering used by every CSV column (bit-stable across runs).
std::string format_number(double v);

}  // namespace qotto::explorer
