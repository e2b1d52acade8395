// Run configuration, orchestration and artifact emission for the ringcav tool

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ringcav/params.hpp"

namespace ringcav::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
    kExitOk = 0,
    kExitUnexpected = 1,
    kExitConfig = 2,
    kExitNumeric = 3,
    kExitRefused = 4,  // truncation or size guard
};

enum class RunTier { Classical, Linear, Moments, Mcwf, Lindblad, Sweep };

const char* tier_name(RunTier t);
RunTier parse_tier(const std::string& name);

struct ParamsBlock {
    double kappa = 1;
    double delta = -1;
    double u0 = 0.01;
    double omega_rec = 0.01;
    std::optional<double> eta;      // give eta or omega_m, not both
    std::optional<double> omega_m;
    bool optimal_detuning = false;  // set delta = -omega_m

    SystemParams<double> resolve() const;
};

struct ClassicalBlock {
    double t_max = 500;
    int n_samples = 2001;
    double rtol = 1e-8;
    double x0 = 0;
    double p0 = 5;
};

struct MomentsBlock {
    double t_max = 2000;
    int n_samples = 2001;
    double rtol = 1e-10;
    double initial_occupancy = 0;  // thermal phonon number at t = 0
};

struct InitialBlock {
    std::string kind = "momentum";  // momentum | thermal | ground
    double e_kin = 25;
    int n_sine = 0;
};

struct QuantumBlock {
    std::string treatment = "coherent_cosine";  // coherent_cosine | full_two_mode
    std::string sector = "even";                // even | full
    int n_mom = 16;
    int n_fock_sine = 6;
    int n_fock_cos = 0;
    double t_max = 300;
    int n_samples = 301;
    InitialBlock initial;
    int n_traj = 100;
    std::uint64_t seed = 1;
    int keep_records = 1;
    double rtol = 1e-7;
    double atol = 1e-9;
    double average_window = 0.2;  // fraction of t_max used for long-time averages
    double fit_skip = 5;
    double jump_threshold = 0.5;
    int min_dwell_samples = 1;
};

struct LindbladBlock {
    double rtol = 1e-9;
    double atol = 1e-11;
    int max_dim = 400;
};

struct SweepBlock {
    std::string axis = "eta";
    std::optional<std::vector<double>> values;  // explicit grid, or start/stop/n/spacing
    double start = 1;
    double stop = 10;
    int n = 10;
    std::string spacing = "log";  // log | linear
    std::vector<std::string> quantities = {"linear.n_at", "linear.gamma"};

    std::vector<double> grid() const;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    RunTier tier = RunTier::Linear;
    ParamsBlock params;
    ClassicalBlock classical;
    MomentsBlock moments;
    QuantumBlock quantum;
    LindbladBlock lindblad;
    SweepBlock sweep;
    std::string out_dir = "out";
};

/// Parses and validates a config; throws ConfigError with the offending key path.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json read_config_json(const std::filesystem::path& path);
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved config for the selected tier; parse_config(manifest) reproduces the run.
nlohmann::json manifest(const RunConfig& c);

struct Overrides {
    std::optional<std::filesystem::path> out;
    std::optional<std::string> tier;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

/// Runs the configured tier and writes the CSV data, summary.json and
/// manifest.json into out. Throws on failure.
void execute(const RunConfig& c, const std::filesystem::path& out, std::optional<int> threads);

/// Complete command: load, override, execute, map failures to exit codes and
/// write error reports. Never throws.
int run(const std::filesystem::path& config_path, const Overrides& o);

}  // namespace ringcav::cli
