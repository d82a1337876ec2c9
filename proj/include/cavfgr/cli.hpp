// cli.hpp: configuration, orchestration and file output behind the
// `cavfgr` command-line tool. Everything here is callable without the
// argument parser so the tests can drive it directly.
//
// Config document (JSON), all blocks optional:
//   model:        {"goa": {Omega, y0, eta, omega_c, n_secondary, omega_DA, gamma, s, e_ground}}
//                 or {"file": "<model file>", "lenient": false}
//   environment:  {"kT": x} | {"beta": x} | {"temperature_K": x}   (temperature_K needs meV_fs units)
//   cavity:       {"omega_p": x, "g_p": x}
//   grid:         {"dt": x, "t_max": x}
//   variants:     ["NE", "C-NE", "EQ", "C-EQ", "IMT", "C-IMT", "LT-IMT", "C-LT-IMT"]
//   efgr:         {"rtol", "atol", "tau_max", "panel", "probe_panels", "backward": "integral" | "detailed_balance"}
//   correlator:   {"exponent_cap": x}
//   output, workers, extend_with_plateau, description
//   sweep:        {"kT": [...], "eta": [...], "s": [...], "omega_DA": [...], "omega_p_table": [...], "max_cells": n}
//   optimize:     {"method", "lo", "hi", "scan_points", "rel_tol", "coupling_exponent", "reference_frequency"}

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cavfgr/bath.hpp"
#include "cavfgr/dynamics.hpp"
#include "cavfgr/optimizer.hpp"
#include "cavfgr/rates.hpp"

namespace cavfgr::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class EnvKind { kT, beta, temperature_K };

struct EnvSpec {
    EnvKind kind = EnvKind::kT;
    double value = 1.0;

    /// temperature_K is only meaningful for meV_fs models.
    [[nodiscard]] ThermalEnv resolve(const DisplacedHarmonicModel& model) const;
    [[nodiscard]] nlohmann::json to_json() const;
};

struct ModelSource {
    std::optional<GOASpec> goa;
    std::filesystem::path file;
    bool lenient = false;

    [[nodiscard]] DisplacedHarmonicModel build() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

struct RunConfig {
    std::string description;
    ModelSource model;
    EnvSpec env;
    std::optional<CavityMode> cavity;
    TimeGrid grid{0.01, 2000};
    std::vector<Variant> variants;  // canonical order, no duplicates
    std::filesystem::path output = "cavfgr_out";
    unsigned workers = 0;
    EfgrOptions efgr;
    CorrelatorOptions correlator;
    double extend_to = 0.0;
};

struct OmegaPEntry {
    std::optional<double> kT, eta, s, omega_DA;
    double omega_p = 1.0;
};

struct SweepConfig {
    RunConfig base;
    std::vector<double> kT, eta, s, omega_DA;
    std::vector<OmegaPEntry> omega_p_table;
    std::size_t max_cells = 500;
};

struct OptimizeConfig {
    RunConfig base;
    OptimizerOptions options;
    bool bounds_given = false;
    bool reference_given = false;
    std::vector<double> kT, omega_DA;
};

[[nodiscard]] RunConfig run_config_from_json(const nlohmann::json& doc);
[[nodiscard]] SweepConfig sweep_config_from_json(const nlohmann::json& doc);
[[nodiscard]] OptimizeConfig optimize_config_from_json(const nlohmann::json& doc);
/// Parses a config file; ConfigError on malformed JSON.
[[nodiscard]] nlohmann::json read_config_file(const std::filesystem::path& path);

struct RunOutput {
    std::vector<RateSeries> rates;  // per variant: forward then backward
    std::vector<PopulationTrajectory> populations;
    nlohmann::json meta;
};

[[nodiscard]] RunOutput execute_run(const RunConfig& cfg, const DisplacedHarmonicModel& model);
void write_run(const RunOutput& out, const std::filesystem::path& dir);

struct SweepSummary {
    std::size_t cells = 0;
    std::size_t failed = 0;
};
SweepSummary execute_sweep(const SweepConfig& cfg);

/// Writes scan/optimum files under cfg.base.output; returns the results in cell order.
std::vector<OptimizationResult> execute_optimize(const OptimizeConfig& cfg);

/// Shortest round-trip decimal (17 significant digits).
[[nodiscard]] std::string format_double(double x);

/// Entry point of the `cavfgr` tool. Exit codes: 0 ok, 2 config error, 3 numerical failure.
int main(int argc, char** argv);

}  // namespace cavfgr::cli
