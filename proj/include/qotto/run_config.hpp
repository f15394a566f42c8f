#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qotto/explorer.hpp"
#include "qotto/protocol.hpp"
#include "qotto/spin_system.hpp"
#include "qotto/thermo.hpp"

// Single-document JSON run configuration shared by every CLI subcommand.
// Exactly one protocol form (a tanh sweep or an explicit sample table) is
// present; emitted outputs echo the configuration, and the echo re-parses
// to an identical RunConfig.

namespace qotto::cli {

enum class OutputFormat { csv, json };

struct RunConfig {
    // protocol: exactly one of the two forms
    std::optional<protocol::TanhSweepConfig> tanh;
    int tanh_samples = 2001;
    std::optional<std::vector<FieldSample>> samples;

    spin::CouplingConfig coupling;
    std::optional<thermo::BathConfig> bath;
    spin::EvolveOptions evolve;
    bool use_asymptotic_endpoints = true;  // tanh protocols only
    bool adiabatic = false;                // pin persistence at (1,1,1)

    std::optional<explorer::SweepSpec> sweep;
    std::optional<std::vector<double>> trajectory_taus;

    std::optional<std::string> out_path;
    std::optional<OutputFormat> out_format;

    bool operator==(const RunConfig&) const = default;

    void validate() const;
    protocol::FieldProtocol build_protocol() const;
    // endpoint splittings for cycle math, honoring use_asymptotic_endpoints
    std::pair<double, double> endpoint_splittings() const;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json run_config_json(const RunConfig& c);

// CLI entry point: <tool> evolve|cycle|planes|sweep|optimize --config <path>
// [--out <path>] [--format csv|json]. Exit codes: 0 success, 2 config
// error, 3 numerical/physical error; failures print one machine-readable
// JSON object on stderr.
int run_cli(int argc, const char* const* argv);

}  // namespace qotto::cli
