#pragma once

#include "ivtheta/estimation.hpp"
#include "ivtheta/sample_set.hpp"
#include "ivtheta/solver.hpp"

#include <nlohmann/json_fwd.hpp>
#include <filesystem>
#include <string>

namespace ivtheta {

// 17 significant digits, round-trips doubles exactly
std::string format_double(double v);

struct FileMeta {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string scenario_id;
};

// samples.csv: optional `# {json}` meta line, then `z,x,y`, one row per record
void write_samples_csv(const std::filesystem::path& path, const SampleSet& ss,
                       const FileMeta& meta);
SampleSet read_samples_csv(const std::filesystem::path& path);

// kernel.csv: one-line JSON header comment with grid metadata, then one row
// per non-baseline level
void write_kernel_csv(const std::filesystem::path& path, const KernelMatrix& km,
                      const QuadratureGrid& grid, const FileMeta& meta);
std::pair<KernelMatrix, QuadratureGrid> read_kernel_csv(const std::filesystem::path& path);

// rhs.csv: JSON header comment, then `z,value,noise_scale`
void write_rhs_csv(const std::filesystem::path& path, const std::vector<double>& z_levels,
                   const RhsVector& rhs, const FileMeta& meta);
std::pair<std::vector<double>, RhsVector> read_rhs_csv(const std::filesystem::path& path);

// theta.csv: `x,theta_hat`
void write_theta_csv(const std::filesystem::path& path, const QuadratureGrid& grid,
                     const Eigen::VectorXd& theta, const FileMeta& meta);
std::pair<std::vector<double>, Eigen::VectorXd> read_theta_csv(
    const std::filesystem::path& path);

void write_solution_json(const std::filesystem::path& path, const RegularizedSolution& sol,
                         const FileMeta& meta);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

} // namespace ivtheta
