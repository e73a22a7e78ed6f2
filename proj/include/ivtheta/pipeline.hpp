#pragma once

#include "ivtheta/io.hpp"
#include "ivtheta/scenario.hpp"
#include "ivtheta/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace ivtheta {

struct GridConfig {
    int j_points = 201;
    double pad_fraction = 0.1;
};

struct SolverConfig {
    PenaltyKind penalty = PenaltyKind::SecondDifference;
    // "auto:discrepancy", "auto:l-curve", or a fixed numeric value
    std::string lambda = "auto:discrepancy";
};

struct ValidateConfig {
    long n_condition = 20000;
    long n_rate = 100000;
    std::vector<double> sigma_ladder = {0.4, 0.2, 0.1, 0.05};
};

// Parsed run configuration; raw_json is the canonical form that config_hash
// is computed from, so identical configs hash identically.
struct RunConfig {
    Scenario scenario;
    int n_per_level = 10000;
    std::uint64_t seed = 1;
    GridConfig grid;
    SolverConfig solver;
    ValidateConfig validate;
    std::filesystem::path out = ".";
    std::string config_hash;

    FileMeta meta() const { return {seed, config_hash, scenario.id}; }
};

RunConfig load_config(const std::filesystem::path& config_path,
                      std::optional<std::uint64_t> seed_override,
                      std::optional<std::filesystem::path> out_override);

// Subcommand bodies. Each writes exactly the files named in its contract
// under config.out and throws Usage/Data/Validation/Numerical errors that the
// CLI maps to exit codes 1/2/3.
void cmd_simulate(const RunConfig& config, bool quiet);
void cmd_estimate(const RunConfig& config, std::optional<std::filesystem::path> samples_path,
                  bool quiet);
void cmd_solve(const RunConfig& config, std::optional<std::filesystem::path> kernel_path,
               std::optional<std::filesystem::path> rhs_path, bool quiet);
// returns true iff all mandatory checks pass
bool cmd_validate(const RunConfig& config, bool quiet);
void cmd_report(const RunConfig& config, const std::filesystem::path& run_dir, bool quiet);

} // namespace ivtheta
