#include "qotto/run_config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace qotto::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* section,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError(std::string("config: unknown key '") + it.key() +
                              "' in section " + section);
    }
}

double get_num(const json& j, const char* key, const char* section) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError(std::string("config: ") + section + "." + key +
                          " must be a number");
    return j.at(key).get<double>();
}

double get_num_or(const json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number())
        throw ConfigError(std::string("config: ") + key + " must be a number");
    return j.at(key).get<double>();
}

}  // namespace

void RunConfig::validate() const {
    if (tanh.has_value() == samples.has_value())
        throw ConfigError(
            "config: exactly one protocol form (tanh or samples) must be present");
    if (tanh) tanh->validate();
    if (samples) protocol::from_samples(*samples);
    if (tanh_samples < 2) throw ConfigError("config: protocol.tanh.samples must be >= 2");
    if (bath) bath->validate();
    if (evolve.steps < 0) throw ConfigError("config: discretization.steps must be >= 0");
    if (!(evolve.max_step_angle > 0.0))
        throw ConfigError("config: discretization.max_step_angle must be positive");
    if (trajectory_taus) {
        if (trajectory_taus->empty())
            throw ConfigError("config: trajectory.tau_values must be non-empty");
        for (std::size_t i = 0; i < trajectory_taus->size(); ++i) {
            if (!((*trajectory_taus)[i] > 0.0))
                throw ConfigError("config: trajectory tau values must be positive");
            if (i > 0 && !((*trajectory_taus)[i - 1] < (*trajectory_taus)[i]))
                throw ConfigError("config: trajectory tau values must be ascending");
        }
    }
}

protocol::FieldProtocol RunConfig::build_protocol() const {
    validate();
    if (tanh) return protocol::tanh_sweep(*tanh, tanh_samples);
    return protocol::from_samples(*samples);
}

std::pair<double, double> RunConfig::endpoint_splittings() const {
    if (tanh && use_asymptotic_endpoints)
        return protocol::asymptotic_frequencies(*tanh);
    return protocol::endpoint_frequencies(build_protocol());
}

RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    check_keys(j, "top level",
               {"protocol", "coupling", "bath", "discretization",
                "use_asymptotic_endpoints", "adiabatic", "sweep", "trajectory",
                "output"});
    RunConfig c;

    if (!j.contains("protocol") || !j.at("protocol").is_object())
        throw ConfigError("config: missing protocol section");
    const json& pj = j.at("protocol");
    check_keys(pj, "protocol", {"tanh", "samples"});
    if (pj.contains("tanh")) {
        const json& tj = pj.at("tanh");
        check_keys(tj, "protocol.tanh",
                   {"delta", "u_i", "u_f", "t1", "t2", "tau", "samples"});
        protocol::TanhSweepConfig t;
        t.delta = get_num(tj, "delta", "protocol.tanh");
        t.u_i = get_num(tj, "u_i", "protocol.tanh");
        t.u_f = get_num(tj, "u_f", "protocol.tanh");
        t.t1 = get_num_or(tj, "t1", 0.0);
        t.t2 = get_num_or(tj, "t2", 20.0);
        t.tau = get_num(tj, "tau", "protocol.tanh");
        c.tanh = t;
        c.tanh_samples = static_cast<int>(get_num_or(tj, "samples", 2001));
    }
    if (pj.contains("samples")) {
        const json& sj = pj.at("samples");
        if (!sj.is_array())
            throw ConfigError("config: protocol.samples must be an array of rows");
        std::vector<FieldSample> rows;
        for (const auto& row : sj) {
            if (!row.is_array() || row.size() != 4)
                throw ConfigError(
                    "config: each protocol sample must be [time, X, Y, Z]");
            FieldSample s;
            s.time = row[0].get<double>();
            s.x = row[1].get<double>();
            s.y = row[2].get<double>();
            s.z = row[3].get<double>();
            rows.push_back(s);
        }
        c.samples = std::move(rows);
    }

    if (j.contains("coupling")) {
        check_keys(j.at("coupling"), "coupling", {"J"});
        c.coupling.J = get_num(j.at("coupling"), "J", "coupling");
    }
    if (j.contains("bath")) {
        const json& bj = j.at("bath");
        check_keys(bj, "bath", {"kB_Th", "Tc_over_Th"});
        const double th = get_num(bj, "kB_Th", "bath");
        const double ratio = get_num(bj, "Tc_over_Th", "bath");
        if (!(ratio > 0.0 && ratio < 1.0))
            throw ConfigError("config: bath.Tc_over_Th must lie in (0,1)");
        c.bath = thermo::BathConfig(th, ratio * th);
    }
    if (j.contains("discretization")) {
        const json& dj = j.at("discretization");
        check_keys(dj, "discretization", {"steps", "max_step_angle"});
        c.evolve.steps = static_cast<std::int64_t>(get_num_or(dj, "steps", 0.0));
        c.evolve.max_step_angle = get_num_or(dj, "max_step_angle", 1e-3);
    }
    if (j.contains("use_asymptotic_endpoints"))
        c.use_asymptotic_endpoints = j.at("use_asymptotic_endpoints").get<bool>();
    if (j.contains("adiabatic")) c.adiabatic = j.at("adiabatic").get<bool>();

    if (j.contains("sweep")) {
        const json& sj = j.at("sweep");
        check_keys(sj, "sweep",
                   {"homega1", "omega_ratio", "kB_Th", "Tc_over_Th", "J", "tau",
                    "axes", "objective", "workers", "window_t1", "window_t2"});
        explorer::SweepSpec spec;
        // defaults inherited from the protocol and bath sections, then
        // overridable inside the sweep section
        if (c.tanh) {
            const auto [w1, w2] = protocol::asymptotic_frequencies(*c.tanh);
            spec.homega1 = w1;
            spec.omega_ratio = w2 / w1;
            spec.window_t1 = c.tanh->t1;
            spec.window_t2 = c.tanh->t2;
            spec.tau = c.tanh->tau;
        }
        if (c.bath) {
            spec.T_h = c.bath->T_h;
            spec.Tc_over_Th = c.bath->T_c / c.bath->T_h;
        }
        spec.J = c.coupling.J;
        spec.homega1 = get_num_or(sj, "homega1", spec.homega1);
        spec.omega_ratio = get_num_or(sj, "omega_ratio", spec.omega_ratio);
        spec.T_h = get_num_or(sj, "kB_Th", spec.T_h);
        spec.Tc_over_Th = get_num_or(sj, "Tc_over_Th", spec.Tc_over_Th);
        spec.J = get_num_or(sj, "J", spec.J);
        spec.tau = get_num_or(sj, "tau", spec.tau);
        spec.window_t1 = get_num_or(sj, "window_t1", spec.window_t1);
        spec.window_t2 = get_num_or(sj, "window_t2", spec.window_t2);
        spec.workers = static_cast<int>(get_num_or(sj, "workers", 0.0));
        spec.adiabatic = c.adiabatic;
        spec.evolve = c.evolve;
        if (sj.contains("objective")) {
            const std::string o = sj.at("objective").get<std::string>();
            if (o == "none")
                spec.objective = explorer::Objective::none;
            else if (o == "work")
                spec.objective = explorer::Objective::work;
            else if (o == "efficiency")
                spec.objective = explorer::Objective::efficiency;
            else
                throw ConfigError("config: sweep.objective must be none, work or "
                                  "efficiency");
        }
        if (!sj.contains("axes") || !sj.at("axes").is_array() ||
            sj.at("axes").empty())
            throw ConfigError("config: sweep.axes must be a non-empty array");
        for (const auto& aj : sj.at("axes")) {
            if (!aj.is_object())
                throw ConfigError("config: each sweep axis must be an object");
            check_keys(aj, "sweep.axes[]", {"name", "min", "max", "count"});
            explorer::AxisSpec a;
            a.name = explorer::axis_from_name(aj.at("name").get<std::string>());
            a.lo = get_num(aj, "min", "sweep.axes[]");
            a.hi = get_num(aj, "max", "sweep.axes[]");
            a.count = static_cast<int>(get_num(aj, "count", "sweep.axes[]"));
            spec.axes.push_back(a);
        }
        c.sweep = std::move(spec);
    }

    if (j.contains("trajectory")) {
        const json& tj = j.at("trajectory");
        check_keys(tj, "trajectory", {"tau_values"});
        if (!tj.contains("tau_values") || !tj.at("tau_values").is_array())
            throw ConfigError("config: trajectory.tau_values must be an array");
        c.trajectory_taus = tj.at("tau_values").get<std::vector<double>>();
    }

    if (j.contains("output")) {
        const json& oj = j.at("output");
        check_keys(oj, "output", {"path", "format"});
        if (oj.contains("path")) c.out_path = oj.at("path").get<std::string>();
        if (oj.contains("format")) {
            const std::string f = oj.at("format").get<std::string>();
            if (f == "csv")
                c.out_format = OutputFormat::csv;
            else if (f == "json")
                c.out_format = OutputFormat::json;
            else
                throw ConfigError("config: output.format must be csv or json");
        }
    }

    c.validate();
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: JSON parse failure in '" + path + "': " + e.what());
    }
    return parse_run_config(j);
}

nlohmann::json run_config_json(const RunConfig& c) {
    json j;
    if (c.tanh) {
        j["protocol"]["tanh"] = {{"delta", c.tanh->delta}, {"u_i", c.tanh->u_i},
                                 {"u_f", c.tanh->u_f},     {"t1", c.tanh->t1},
                                 {"t2", c.tanh->t2},       {"tau", c.tanh->tau},
                                 {"samples", c.tanh_samples}};
    } else if (c.samples) {
        json rows = json::array();
        for (const auto& s : *c.samples) rows.push_back({s.time, s.x, s.y, s.z});
        j["protocol"]["samples"] = std::move(rows);
    }
    j["coupling"] = {{"J", c.coupling.J}};
    if (c.bath)
        j["bath"] = {{"kB_Th", c.bath->T_h}, {"Tc_over_Th", c.bath->T_c / c.bath->T_h}};
    j["discretization"] = {{"steps", c.evolve.steps},
                           {"max_step_angle", c.evolve.max_step_angle}};
    j["use_asymptotic_endpoints"] = c.use_asymptotic_endpoints;
    j["adiabatic"] = c.adiabatic;
    if (c.sweep) {
        const auto& s = *c.sweep;
        json axes = json::array();
        for (const auto& a : s.axes)
            axes.push_back({{"name", explorer::to_string(a.name)},
                            {"min", a.lo},
                            {"max", a.hi},
                            {"count", a.count}});
        const char* obj = s.objective == explorer::Objective::work ? "work"
                          : s.objective == explorer::Objective::efficiency
                              ? "efficiency"
                              : "none";
        j["sweep"] = {{"homega1", s.homega1},
                      {"omega_ratio", s.omega_ratio},
                      {"kB_Th", s.T_h},
                      {"Tc_over_Th", s.Tc_over_Th},
                      {"J", s.J},
                      {"tau", s.tau},
                      {"window_t1", s.window_t1},
                      {"window_t2", s.window_t2},
                      {"workers", s.workers},
                      {"objective", obj},
                      {"axes", std::move(axes)}};
    }
    if (c.trajectory_taus) j["trajectory"] = {{"tau_values", *c.trajectory_taus}};
    if (c.out_path || c.out_format) {
        json oj = json::object();
        if (c.out_path) oj["path"] = *c.out_path;
        if (c.out_format)
            oj["format"] = *c.out_format == OutputFormat::csv ? "csv" : "json";
        j["output"] = std::move(oj);
    }
    return j;
}

}  // namespace qotto::cli
