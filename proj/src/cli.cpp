#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

#include "qotto/explorer.hpp"
#include "qotto/oracle.hpp"
#include "qotto/run_config.hpp"

namespace qotto::cli {

using nlohmann::json;

namespace {

json complex_json(const algebra::cplx& z) {
    return json::array({z.real(), z.imag()});
}

json matrix_json(const Eigen::Matrix4cd& m) {
    json rows = json::array();
    for (int i = 0; i < 4; ++i) {
        json row = json::array();
        for (int j = 0; j < 4; ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json report_json(const thermo::CycleReport& r) {
    json j{{"E_A", r.E_A},         {"E_B", r.E_B},
           {"E_C", r.E_C},         {"E_D", r.E_D},
           {"Qh_leak", r.Qh_leak}, {"Qh_ad", r.Qh_ad},
           {"Qh_fric", r.Qh_fric}, {"Qc_leak", r.Qc_leak},
           {"Qc_ad", r.Qc_ad},     {"Qc_fric", r.Qc_fric},
           {"Q_h", r.Q_h},         {"Q_c", r.Q_c},
           {"W", r.W},             {"regime", thermo::to_string(r.regime)}};
    j["efficiency"] = r.efficiency ? json(*r.efficiency) : json(nullptr);
    return j;
}

json persistence_json(const spin::Persistence& p) {
    return {{"P", p.P}, {"Pp", p.Pp}, {"Ppp", p.Ppp}};
}

struct CommandIo {
    OutputFormat format = OutputFormat::json;
    std::string out_path;  // empty = stdout

    void write(const std::string& text) const {
        if (out_path.empty()) {
            std::cout << text;
            if (!text.empty() && text.back() != '\n') std::cout << '\n';
            return;
        }
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw ConfigError("output: cannot open '" + out_path + "'");
        f << text;
    }
    void write(const json& j) const { write(j.dump(1) + "\n"); }
};

// persistence + endpoint splittings of the configured protocol
struct StrokeResult {
    double omega1 = 0.0, omega2 = 0.0;
    spin::Persistence persistence;
};

StrokeResult run_stroke(const RunConfig& cfg) {
    StrokeResult out;
    std::tie(out.omega1, out.omega2) = cfg.endpoint_splittings();
    if (cfg.adiabatic) {
        out.persistence = {1.0, 1.0, 1.0};
        return out;
    }
    const auto proto = cfg.build_protocol();
    const auto u = spin::evolve(proto, cfg.coupling, cfg.evolve);
    const auto ei = spin::hamiltonian_eigensystem(proto.samples.front(), cfg.coupling);
    const auto ef = spin::hamiltonian_eigensystem(proto.samples.back(), cfg.coupling);
    out.persistence = spin::transition_matrix(u, ei, ef).persistence;
    return out;
}

thermo::BathConfig require_bath(const RunConfig& cfg) {
    if (!cfg.bath) throw ConfigError("config: bath section required for this command");
    return *cfg.bath;
}

void cmd_evolve(const RunConfig& cfg, const CommandIo& io) {
    if (io.format != OutputFormat::json)
        throw ConfigError("evolve: only JSON output is supported");
    const auto proto = cfg.build_protocol();
    const auto u = spin::evolve(proto, cfg.coupling, cfg.evolve);
    const auto ei = spin::hamiltonian_eigensystem(proto.samples.front(), cfg.coupling);
    const auto ef = spin::hamiltonian_eigensystem(proto.samples.back(), cfg.coupling);
    const auto tm = spin::transition_matrix(u, ei, ef);
    const auto [w1, w2] = cfg.endpoint_splittings();

    json j;
    j["config"] = run_config_json(cfg);
    j["alpha"] = complex_json(u.composed.alpha);
    j["beta"] = complex_json(u.composed.beta);
    j["gamma"] = complex_json(u.composed.gamma);
    j["U"] = matrix_json(u.U);
    j["persistence"] = persistence_json(tm.persistence);
    j["omega1"] = w1;
    j["omega2"] = w2;
    j["duration_t0"] = u.duration;
    io.write(j);
}

void cmd_cycle(const RunConfig& cfg, const CommandIo& io) {
    if (io.format != OutputFormat::json)
        throw ConfigError("cycle: only JSON output is supported");
    const auto bath = require_bath(cfg);
    const auto stroke = run_stroke(cfg);
    const thermo::CycleInputs in{stroke.omega1, stroke.omega2, cfg.coupling.J,
                                 stroke.persistence};
    const auto report = thermo::heats(bath, in);

    json j;
    j["config"] = run_config_json(cfg);
    j["inputs"] = {{"omega1", in.omega1},
                   {"omega2", in.omega2},
                   {"J", in.J},
                   {"persistence", persistence_json(in.persistence)}};
    j["report"] = report_json(report);
    io.write(j);
}

void cmd_planes(const RunConfig& cfg, const CommandIo& io) {
    const auto bath = require_bath(cfg);
    const auto [w1, w2] = cfg.endpoint_splittings();
    const auto qh = thermo::zero_plane(thermo::Quantity::Q_h, bath, w1, w2, cfg.coupling.J);
    const auto qc = thermo::zero_plane(thermo::Quantity::Q_c, bath, w1, w2, cfg.coupling.J);
    const auto w = thermo::zero_plane(thermo::Quantity::W, bath, w1, w2, cfg.coupling.J);

    std::vector<explorer::TrajectoryPoint> traj;
    if (cfg.trajectory_taus) {
        if (!cfg.tanh)
            throw ConfigError("planes: trajectory requires a tanh protocol");
        traj = explorer::tau_trajectory(*cfg.tanh, cfg.coupling, bath,
                                        *cfg.trajectory_taus, cfg.evolve);
    }

    if (io.format == OutputFormat::csv) {
        std::string out = "quantity,c0,cP,cPp,cPpp\n";
        const auto row = [&](const char* name, const thermo::PlaneCoefficients& p) {
            out += std::string(name) + "," + explorer::format_number(p.c0) + "," +
                   explorer::format_number(p.cP) + "," +
                   explorer::format_number(p.cPp) + "," +
                   explorer::format_number(p.cPpp) + "\n";
        };
        row("Q_h", qh);
        row("Q_c", qc);
        row("W", w);
        if (!traj.empty()) out += "\n" + explorer::trajectory_csv(traj);
        io.write(out);
        return;
    }
    json j;
    j["config"] = run_config_json(cfg);
    const auto plane_json = [](const thermo::PlaneCoefficients& p) {
        return json{{"c0", p.c0}, {"cP", p.cP}, {"cPp", p.cPp}, {"cPpp", p.cPpp}};
    };
    j["planes"] = {{"Q_h", plane_json(qh)}, {"Q_c", plane_json(qc)}, {"W", plane_json(w)}};
    if (!traj.empty()) {
        json rows = json::array();
        for (const auto& p : traj)
            rows.push_back({{"tau", p.tau},
                            {"persistence", persistence_json(p.persistence)},
                            {"Q_h", p.Q_h},
                            {"Q_c", p.Q_c},
                            {"W", p.W},
                            {"regime", thermo::to_string(p.regime)}});
        j["trajectory"] = std::move(rows);
    }
    io.write(j);
}

explorer::SweepSpec require_sweep(const RunConfig& cfg) {
    if (!cfg.sweep) throw ConfigError("config: sweep section required for this command");
    return *cfg.sweep;
}

void cmd_sweep(const RunConfig& cfg, const CommandIo& io, bool leak_only) {
    const auto spec = require_sweep(cfg);
    if (leak_only) {
        const auto records = explorer::heat_leak_map(spec);
        if (io.format == OutputFormat::csv) {
            io.write(explorer::leak_csv(records));
            return;
        }
        json rows = json::array();
        for (const auto& r : records)
            rows.push_back({{"J", r.J},
                            {"tau", r.tau},
                            {"Qh_leak", r.Qh_leak},
                            {"leak_negative", r.leak_negative},
                            {"regime", thermo::to_string(r.regime)}});
        io.write(json{{"config", run_config_json(cfg)}, {"records", std::move(rows)}});
        return;
    }

    const auto table = explorer::grid_sweep(spec);
    if (io.format == OutputFormat::csv) {
        io.write(explorer::sweep_csv(table));
        return;
    }
    json rows = json::array();
    for (const auto& rec : table.records) {
        json row;
        for (std::size_t k = 0; k < table.axes.size(); ++k)
            row[explorer::to_string(table.axes[k].name)] = rec.axis_values[k];
        if (rec.error.empty()) {
            row["persistence"] = persistence_json(rec.persistence);
            row["report"] = report_json(rec.report);
        } else {
            row["error"] = rec.error;
        }
        rows.push_back(std::move(row));
    }
    io.write(json{{"config", run_config_json(cfg)}, {"records", std::move(rows)}});
}

void cmd_optimize(const RunConfig& cfg, const CommandIo& io) {
    if (io.format != OutputFormat::json)
        throw ConfigError("optimize: only JSON output is supported");
    const auto spec = require_sweep(cfg);
    if (spec.objective == explorer::Objective::none)
        throw ConfigError("optimize: sweep.objective must be work or efficiency");
    const auto res = explorer::maximize(spec);

    json argmax;
    for (const auto& [axis, value] : res.argmax)
        argmax[explorer::to_string(axis)] = value;
    json j;
    j["config"] = run_config_json(cfg);
    j["objective"] =
        spec.objective == explorer::Objective::work ? "work" : "efficiency";
    j["argmax"] = std::move(argmax);
    j["value"] = res.value;
    j["persistence"] = persistence_json(res.persistence);
    j["report"] = report_json(res.report);
    io.write(j);
}

const char* error_type(const std::exception& e) {
    if (dynamic_cast<const DegenerateFactorization*>(&e)) return "DegenerateFactorization";
    if (dynamic_cast<const CompositionSingularity*>(&e)) return "CompositionSingularity";
    if (dynamic_cast<const DegenerateField*>(&e)) return "DegenerateField";
    if (dynamic_cast<const NonUnitary*>(&e)) return "NonUnitary";
    if (dynamic_cast<const StochasticityViolation*>(&e)) return "StochasticityViolation";
    if (dynamic_cast<const UnphysicalTriple*>(&e)) return "UnphysicalTriple";
    if (dynamic_cast<const RangeError*>(&e)) return "RangeError";
    if (dynamic_cast<const InconsistentEnergies*>(&e)) return "InconsistentEnergies";
    if (dynamic_cast<const NoEngineRegion*>(&e)) return "NoEngineRegion";
    if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    return "InternalError";
}

void print_error(const std::exception& e) {
    const json j{{"error", {{"type", error_type(e)}, {"message", e.what()}}}};
    std::cerr << j.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Lie-algebraic simulator for a coupled two-qubit Otto machine"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    bool leak_only = false;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_path, "output file (default: stdout)");
        sub->add_option("--format", format, "output format: csv or json");
        return sub;
    };
    add_common(app.add_subcommand("evolve",
                                  "composed evolution operator and persistence"));
    add_common(app.add_subcommand("cycle", "full cycle report for one parameter point"));
    add_common(app.add_subcommand(
        "planes", "zero-level plane coefficients in persistence space"));
    auto* sweep = add_common(app.add_subcommand("sweep", "grid sweep over parameters"));
    sweep->add_flag("--heat-leak", leak_only, "emit the heat-leak map only");
    add_common(app.add_subcommand("optimize", "maximize work or efficiency"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << nlohmann::json{
                         {"error", {{"type", "ConfigError"}, {"message", e.what()}}}}
                         .dump()
                  << "\n";
        return 2;
    }

    try {
        const RunConfig cfg = load_run_config(config_path);
        const std::string cmd = app.get_subcommands().front()->get_name();

        CommandIo io;
        io.format = (cmd == "sweep" || cmd == "planes") ? OutputFormat::csv
                                                        : OutputFormat::json;
        if (cfg.out_format) io.format = *cfg.out_format;
        if (!format.empty()) {
            if (format == "csv")
                io.format = OutputFormat::csv;
            else if (format == "json")
                io.format = OutputFormat::json;
            else
                throw ConfigError("--format must be csv or json");
        }
        if (cfg.out_path) io.out_path = *cfg.out_path;
        if (!out_path.empty()) io.out_path = out_path;

        if (cmd == "evolve")
            cmd_evolve(cfg, io);
        else if (cmd == "cycle")
            cmd_cycle(cfg, io);
        else if (cmd == "planes")
            cmd_planes(cfg, io);
        else if (cmd == "sweep")
            cmd_sweep(cfg, io, leak_only);
        else
            cmd_optimize(cfg, io);
        return 0;
    } catch (const ConfigError& e) {
        print_error(e);
        return 2;
    } catch (const std::exception& e) {
        print_error(e);
        return 3;
    }
}

}  // namespace qotto::cli
