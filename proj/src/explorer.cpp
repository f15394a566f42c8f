#include "qotto/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace qotto::explorer {

namespace {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t nthreads =
        std::min<std::size_t>(n, workers > 0 ? static_cast<unsigned>(workers) : hw);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                if (failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// parameter values of one grid point, spec defaults overridden by the axes
struct PointParams {
    double J, tau, omega_ratio, T_h;
};

PointParams point_params(const SweepSpec& spec, std::span<const AxisSpec> axes,
                         std::span<const double> values) {
    PointParams p{spec.J, spec.tau, spec.omega_ratio, spec.T_h};
    for (std::size_t k = 0; k < axes.size(); ++k) {
        switch (axes[k].name) {
            case AxisName::J: p.J = values[k]; break;
            case AxisName::tau: p.tau = values[k]; break;
            case AxisName::omega_ratio: p.omega_ratio = values[k]; break;
            case AxisName::T_h: p.T_h = values[k]; break;
        }
    }
    return p;
}

thermo::CycleReport evaluate_cycle(const SweepSpec& spec, const PointParams& p,
                                   const spin::Persistence& pe) {
    const double omega1 = spec.homega1;
    const double omega2 = spec.homega1 * p.omega_ratio;
    const thermo::BathConfig bath(p.T_h, spec.Tc_over_Th * p.T_h);
    const thermo::CycleInputs in{omega1, omega2, p.J, pe};
    return thermo::heats(bath, in);
}

// grid enumeration in lexicographic order, first axis outermost
std::vector<std::vector<double>> grid_points(std::span<const AxisSpec> axes) {
    std::vector<std::vector<double>> per_axis;
    per_axis.reserve(axes.size());
    std::size_t total = 1;
    for (const auto& a : axes) {
        per_axis.push_back(a.values());
        total *= per_axis.back().size();
    }
    std::vector<std::vector<double>> out;
    out.reserve(total);
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::vector<double> v(axes.size());
        for (std::size_t k = 0; k < axes.size(); ++k) v[k] = per_axis[k][idx[k]];
        out.push_back(std::move(v));
        for (std::size_t k = axes.size(); k-- > 0;) {
            if (++idx[k] < per_axis[k].size()) break;
            idx[k] = 0;
        }
    }
    return out;
}

// persistence evaluations deduplicated by (tau, omega_ratio); slots are
// assigned in first-encounter order and filled in parallel, so the result
// does not depend on the worker count
class PersistenceCache {
  public:
    PersistenceCache(const SweepSpec& spec) : spec_(spec) {}

    void require(const PointParams& p) {
        if (spec_.adiabatic) return;
        const Key key{p.tau, p.omega_ratio};
        if (slot_.find(key) == slot_.end()) {
            slot_.emplace(key, keys_.size());
            keys_.push_back(key);
        }
    }

    void evaluate(int workers) {
        results_.resize(keys_.size());
        parallel_for(keys_.size(), workers, [&](std::size_t i) {
            results_[i] = compute(keys_[i]);
        });
    }

    // persistence (or the stored error) for one point
    std::pair<spin::Persistence, std::string> get(const PointParams& p) const {
        if (spec_.adiabatic) return {spin::Persistence{1.0, 1.0, 1.0}, {}};
        const Key key{p.tau, p.omega_ratio};
        return results_[slot_.at(key)];
    }

  private:
    using Key = std::pair<double, double>;

    std::pair<spin::Persistence, std::string> compute(const Key& key) const {
        try {
            const auto cfg = sweep_protocol(spec_.homega1, key.second,
                                            spec_.window_t1, spec_.window_t2, key.first);
            return {protocol_persistence(cfg, spec_.evolve), {}};
        } catch (const std::exception& e) {
            return {spin::Persistence{}, e.what()};
        }
    }

    const SweepSpec& spec_;
    std::map<Key, std::size_t> slot_;
    std::vector<Key> keys_;
    std::vector<std::pair<spin::Persistence, std::string>> results_;
};

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// objective for maximize(); -inf marks infeasible points
double objective_value(const SweepSpec& spec, const PointParams& p,
                       const PersistenceCache* cache) {
    if (!(p.omega_ratio > 1e-6 && p.omega_ratio < 1.0 - 1e-9)) return kNegInf;
    if (!(p.T_h > 0.0) || !(p.tau > 0.0) || p.J < 0.0) return kNegInf;
    if (8.0 * p.J >= spec.homega1 * p.omega_ratio) return kNegInf;
    try {
        spin::Persistence pe{1.0, 1.0, 1.0};
        if (!spec.adiabatic) {
            if (cache) {
                auto [val, err] = cache->get(p);
                if (!err.empty()) return kNegInf;
                pe = val;
            } else {
                const auto cfg = sweep_protocol(spec.homega1, p.omega_ratio,
                                                spec.window_t1, spec.window_t2, p.tau);
                pe = protocol_persistence(cfg, spec.evolve);
            }
        }
        const auto report = evaluate_cycle(spec, p, pe);
        if (spec.objective == Objective::work) return report.W;
        return report.efficiency ? *report.efficiency : kNegInf;
    } catch (const std::exception&) {
        return kNegInf;
    }
}

// textbook Nelder-Mead with coordinates projected into [lo, hi] boxes
std::vector<double> nelder_mead(const std::function<double(std::span<const double>)>& f,
                                std::vector<double> x0,
                                std::span<const std::pair<double, double>> box,
                                int max_iter) {
    const std::size_t d = x0.size();
    auto project = [&](std::vector<double>& x) {
        for (std::size_t k = 0; k < d; ++k) x[k] = std::clamp(x[k], box[k].first, box[k].second);
    };
    project(x0);

    struct Vertex {
        std::vector<double> x;
        double f;
    };
    std::vector<Vertex> s;
    s.push_back({x0, f(x0)});
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> x = x0;
        const double span = box[k].second - box[k].first;
        double h = 0.05 * span;
        if (h == 0.0) h = 1e-4;
        x[k] = (x[k] + h <= box[k].second) ? x[k] + h : x[k] - h;
        project(x);
        s.push_back({x, f(x)});
    }

    auto centroid = [&](std::size_t excl) {
        std::vector<double> c(d, 0.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i == excl) continue;
            for (std::size_t k = 0; k < d; ++k) c[k] += s[i].x[k];
        }
        for (auto& v : c) v /= static_cast<double>(d);
        return c;
    };
    auto blend = [&](const std::vector<double>& a, const std::vector<double>& b,
                     double t) {
        std::vector<double> x(d);
        for (std::size_t k = 0; k < d; ++k) x[k] = a[k] + t * (b[k] - a[k]);
        project(x);
        return x;
    };

    for (int it = 0; it < max_iter; ++it) {
        std::sort(s.begin(), s.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
        double diam = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double lo = s[0].x[k], hi = s[0].x[k];
            for (const auto& v : s) {
                lo = std::min(lo, v.x[k]);
                hi = std::max(hi, v.x[k]);
            }
            diam = std::max(diam, hi - lo);
        }
        if (diam < 1e-11) break;

        const std::size_t worst = s.size() - 1;
        const auto c = centroid(worst);
        const auto xr = blend(c, s[worst].x, -1.0);
        const double fr = f(xr);
        if (fr > s[0].f) {
            const auto xe = blend(c, s[worst].x, -2.0);
            const double fe = f(xe);
            if (fe > fr)
                s[worst] = {xe, fe};
            else
                s[worst] = {xr, fr};
        } else if (fr > s[worst - 1].f) {
            s[worst] = {xr, fr};
        } else {
            const auto xc = blend(c, s[worst].x, 0.5);
            const double fc = f(xc);
            if (fc > s[worst].f) {
                s[worst] = {xc, fc};
            } else {
                for (std::size_t i = 1; i < s.size(); ++i) {
                    s[i].x = blend(s[0].x, s[i].x, 0.5);
                    s[i].f = f(s[i].x);
                }
            }
        }
    }
    std::sort(s.begin(), s.end(),
              [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
    return s[0].x;
}

}  // namespace

std::string to_string(AxisName a) {
    switch (a) {
        case AxisName::J: return "J";
        case AxisName::tau: return "tau";
        case AxisName::omega_ratio: return "omega2_over_omega1";
        case AxisName::T_h: return "kB_Th";
    }
    return "J";
}

AxisName axis_from_name(const std::string& name) {
    if (name == "J") return AxisName::J;
    if (name == "tau") return AxisName::tau;
    if (name == "omega2_over_omega1" || name == "omega_ratio")
        return AxisName::omega_ratio;
    if (name == "kB_Th" || name == "T_h") return AxisName::T_h;
    throw ConfigError("unknown sweep axis '" + name + "'");
}

void AxisSpec::validate() const {
    if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi)
        throw ConfigError("axis " + to_string(name) + ": invalid range");
    if (count < 1) throw ConfigError("axis " + to_string(name) + ": count must be >= 1");
    if (count > 1 && !(lo < hi))
        throw ConfigError("axis " + to_string(name) + ": degenerate range needs count 1");
}

std::vector<double> AxisSpec::values() const {
    validate();
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        v.push_back(lo);
        return v;
    }
    for (int i = 0; i < count; ++i)
        v.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
    return v;
}

void SweepSpec::validate() const {
    if (!(homega1 > 0.0)) throw ConfigError("sweep: homega1 must be positive");
    if (!(omega_ratio > 0.0 && omega_ratio < 1.0))
        throw ConfigError("sweep: omega ratio must lie in (0,1)");
    if (!(T_h > 0.0)) throw ConfigError("sweep: T_h must be positive");
    if (!(Tc_over_Th > 0.0 && Tc_over_Th < 1.0))
        throw ConfigError("sweep: Tc/Th must lie in (0,1)");
    if (!(tau > 0.0)) throw ConfigError("sweep: tau must be positive");
    if (!(window_t1 < window_t2)) throw ConfigError("sweep: invalid window");
    if (axes.empty()) throw ConfigError("sweep: no axes given");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        axes[i].validate();
        for (std::size_t j = 0; j < i; ++j)
            if (axes[i].name == axes[j].name)
                throw ConfigError("sweep: axis " + to_string(axes[i].name) +
                                  " listed twice");
    }
}

protocol::TanhSweepConfig sweep_protocol(double homega1, double omega_ratio,
                                         double t1, double t2, double tau) {
    if (!(omega_ratio > 0.0 && omega_ratio < 1.0))
        throw ConfigError("sweep protocol: omega ratio must lie in (0,1)");
    const double homega2 = homega1 * omega_ratio;
    protocol::TanhSweepConfig cfg;
    cfg.delta = homega2 / 2.0;
    cfg.u_i = std::sqrt(homega1 * homega1 - homega2 * homega2) / 2.0;
    cfg.u_f = 0.0;
    cfg.t1 = t1;
    cfg.t2 = t2;
    cfg.tau = tau;
    return cfg;
}

spin::Persistence protocol_persistence(const protocol::TanhSweepConfig& cfg,
                                       const spin::EvolveOptions& opt) {
    const auto proto = protocol::tanh_sweep(cfg, 257);
    const spin::CouplingConfig no_coupling{0.0};
    const auto u = spin::evolve(proto, no_coupling, opt);
    const auto ei = spin::hamiltonian_eigensystem(proto.samples.front(), no_coupling);
    const auto ef = spin::hamiltonian_eigensystem(proto.samples.back(), no_coupling);
    return spin::transition_matrix(u, ei, ef).persistence;
}

std::vector<TrajectoryPoint> tau_trajectory(const protocol::TanhSweepConfig& base,
                                            const spin::CouplingConfig& c,
                                            const thermo::BathConfig& bath,
                                            std::span<const double> tau_values,
                                            const spin::EvolveOptions& opt,
                                            int workers) {
    base.validate();
    bath.validate();
    for (std::size_t i = 0; i < tau_values.size(); ++i) {
        if (!(tau_values[i] > 0.0))
            throw ConfigError("tau_trajectory: tau values must be positive");
        if (i > 0 && !(tau_values[i - 1] < tau_values[i]))
            throw ConfigError("tau_trajectory: tau values must be sorted ascending");
    }
    const auto [omega1, omega2] = protocol::asymptotic_frequencies(base);

    std::vector<TrajectoryPoint> out(tau_values.size());
    parallel_for(tau_values.size(), workers, [&](std::size_t i) {
        protocol::TanhSweepConfig cfg = base;
        cfg.tau = tau_values[i];
        TrajectoryPoint pt;
        pt.tau = cfg.tau;
        pt.persistence = protocol_persistence(cfg, opt);
        const thermo::CycleInputs in{omega1, omega2, c.J, pt.persistence};
        const auto report = thermo::heats(bath, in);
        pt.regime = report.regime;
        pt.Q_h = report.Q_h;
        pt.Q_c = report.Q_c;
        pt.W = report.W;
        out[i] = pt;
    });
    return out;
}

SweepTable grid_sweep(const SweepSpec& spec) {
    spec.validate();
    const auto points = grid_points(spec.axes);

    PersistenceCache cache(spec);
    for (const auto& v : points) cache.require(point_params(spec, spec.axes, v));
    cache.evaluate(spec.workers);

    SweepTable table;
    table.axes = spec.axes;
    table.records.resize(points.size());
    parallel_for(points.size(), spec.workers, [&](std::size_t i) {
        SweepRecord rec;
        rec.axis_values = points[i];
        const auto p = point_params(spec, spec.axes, points[i]);
        try {
            auto [pe, err] = cache.get(p);
            if (!err.empty()) throw NumericalError(err);
            rec.persistence = pe;
            rec.report = evaluate_cycle(spec, p, pe);
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        table.records[i] = std::move(rec);
    });
    return table;
}

std::vector<LeakRecord> heat_leak_map(const SweepSpec& spec) {
    spec.validate();
    if (spec.axes.size() != 2 || spec.axes[0].name != AxisName::J ||
        spec.axes[1].name != AxisName::tau)
        throw ConfigError("heat_leak_map: expects exactly the axes (J, tau)");

    const auto table = grid_sweep(spec);
    std::vector<LeakRecord> out;
    out.reserve(table.records.size());
    for (const auto& rec : table.records) {
        LeakRecord lr;
        lr.J = rec.axis_values[0];
        lr.tau = rec.axis_values[1];
        if (rec.error.empty()) {
            lr.Qh_leak = rec.report.Qh_leak;
            lr.leak_negative = rec.report.Qh_leak < 0.0;
            lr.regime = rec.report.regime;
        }
        out.push_back(lr);
    }
    return out;
}

MaximizeResult maximize(const SweepSpec& spec) {
    spec.validate();
    if (spec.objective == Objective::none)
        throw ConfigError("maximize: objective must be work or efficiency");

    const auto points = grid_points(spec.axes);
    PersistenceCache cache(spec);
    for (const auto& v : points) cache.require(point_params(spec, spec.axes, v));
    cache.evaluate(spec.workers);

    std::vector<double> scores(points.size(), kNegInf);
    parallel_for(points.size(), spec.workers, [&](std::size_t i) {
        scores[i] = objective_value(spec, point_params(spec, spec.axes, points[i]), &cache);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    if (scores[best] == kNegInf) {
        if (spec.objective == Objective::efficiency)
            throw NoEngineRegion("maximize: no engine-regime point on the coarse grid");
        throw NumericalError("maximize: no feasible point on the coarse grid");
    }

    std::vector<std::pair<double, double>> box;
    box.reserve(spec.axes.size());
    for (const auto& a : spec.axes) box.emplace_back(a.lo, a.hi);

    // finite-tau refinement re-evaluates protocols at simplex vertices
    auto f = [&](std::span<const double> x) {
        return objective_value(spec, point_params(spec, spec.axes, x), nullptr);
    };
    std::vector<double> x =
        nelder_mead(f, points[best], box, 400 * static_cast<int>(spec.axes.size()));
    double fx = f(x);
    // the refined point never reports worse than the coarse scan
    if (!(fx >= scores[best])) {
        x = points[best];
        fx = scores[best];
    }

    MaximizeResult res;
    const auto p = point_params(spec, spec.axes, x);
    for (std::size_t k = 0; k < spec.axes.size(); ++k)
        res.argmax.emplace_back(spec.axes[k].name, x[k]);
    res.value = fx;
    auto [pe, err] = spec.adiabatic
                         ? std::pair<spin::Persistence, std::string>{{1.0, 1.0, 1.0}, {}}
                         : std::pair<spin::Persistence, std::string>{
                               protocol_persistence(
                                   sweep_protocol(spec.homega1, p.omega_ratio,
                                                  spec.window_t1, spec.window_t2, p.tau),
                                   spec.evolve),
                               {}};
    if (!err.empty()) throw NumericalError(err);
    res.persistence = pe;
    res.report = evaluate_cycle(spec, p, pe);
    return res;
}

std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // normalize the sign of zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sweep_csv(const SweepTable& table) {
    std::string out;
    for (const auto& a : table.axes) out += to_string(a.name) + ",";
    out +=
        "P,Pp,Ppp,E_A,E_B,E_C,E_D,Qh_leak,Qh_ad,Qh_fric,Qc_leak,Qc_ad,Qc_fric,"
        "Q_h,Q_c,W,efficiency,regime,error\n";
    for (const auto& rec : table.records) {
        for (double v : rec.axis_values) out += format_number(v) + ",";
        if (rec.error.empty()) {
            const auto& r = rec.report;
            for (double v : {rec.persistence.P, rec.persistence.Pp, rec.persistence.Ppp,
                             r.E_A, r.E_B, r.E_C, r.E_D, r.Qh_leak, r.Qh_ad, r.Qh_fric,
                             r.Qc_leak, r.Qc_ad, r.Qc_fric, r.Q_h, r.Q_c, r.W})
                out += format_number(v) + ",";
            out += (r.efficiency ? format_number(*r.efficiency) : "") + ",";
            out += to_string(r.regime) + ",\n";
        } else {
            for (int k = 0; k < 17; ++k) out += ",";
            out += "," + csv_escape(rec.error) + "\n";
        }
    }
    return out;
}

std::string leak_csv(const std::vector<LeakRecord>& records) {
    std::string out = "J,tau,Qh_leak,leak_negative,regime\n";
    for (const auto& r : records) {
        out += format_number(r.J) + "," + format_number(r.tau) + "," +
               format_number(r.Qh_leak) + "," + (r.leak_negative ? "1" : "0") + "," +
               to_string(r.regime) + "\n";
    }
    return out;
}

std::string trajectory_csv(const std::vector<TrajectoryPoint>& points) {
    std::string out = "tau,P,Pp,Ppp,Q_h,Q_c,W,regime\n";
    for (const auto& p : points) {
        for (double v : {p.tau, p.persistence.P, p.persistence.Pp, p.persistence.Ppp,
                         p.Q_h, p.Q_c, p.W})
            out += format_number(v) + ",";
        out += to_string(p.regime) + "\n";
    }
    return out;
}

}  // namespace qotto::explorer
