#pragma once

#include "ivtheta/sample_set.hpp"
#include "ivtheta/scenario.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace ivtheta {

struct MuEstimate {
    double z = 0.0;
    double mean = 0.0;
    double stderr_ = 0.0;
    long n = 0;
};

// Discretized kernel K(z_i, x_j) = F(x_j | baseline) - F(x_j | z_i) on an
// x-grid; the identically-zero baseline row is excluded.
struct KernelMatrix {
    std::vector<double> x_grid;
    std::vector<double> z_levels; // non-baseline levels, in sample order
    double baseline_z = 0.0;
    Eigen::MatrixXd entries; // z_levels.size() x x_grid.size()
};

// Right-hand side mu(z_i) - mu(baseline), aligned with KernelMatrix.z_levels.
// noise_scale combines the two group standard errors in quadrature.
struct RhsVector {
    Eigen::VectorXd values;
    Eigen::VectorXd noise_scale;
};

MuEstimate estimate_mu(const SampleSet& sample_set, double z);

KernelMatrix build_kernel(const SampleSet& sample_set, const std::vector<double>& x_grid,
                          double baseline_z = 0.0);

RhsVector build_rhs(const SampleSet& sample_set, double baseline_z = 0.0);

// Gauss-Hermite rule for integral exp(-t^2) f(t) dt (physicists' weight),
// nodes ascending. Computed by Golub-Welsch; cached per n.
struct GaussHermite {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};
const GaussHermite& gauss_hermite(int n);

// Monte-Carlo estimate of mu_sigma(z) = E integral phi_sigma(x - X(z)) Y(x) dx,
// with the inner integral done exactly by 41-node Gauss-Hermite quadrature.
// Uses the same substreams as mu reference runs with the same seed, so
// sigma-ladders share noise draws.
double smoothed_mu(const Scenario& scenario, double z, double sigma, long n,
                   std::uint64_t seed);

// E(Y | Z = z) Monte-Carlo companion to smoothed_mu, same draws for the same seed.
double smoothed_mu_reference(const Scenario& scenario, double z, long n, std::uint64_t seed);

} // namespace ivtheta
