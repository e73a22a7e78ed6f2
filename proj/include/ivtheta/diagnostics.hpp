#pragma once

#include "ivtheta/sampling.hpp"
#include "ivtheta/solver.hpp"

#include <map>
#include <string>
#include <vector>

namespace ivtheta {

struct ConditionReport {
    int condition = 0; // 3, 5 or 6
    std::map<std::string, double> statistics;
    bool pass = false;
    std::string details;
};

// Condition 3: bounded density of X(z). Histogram sup-density per level,
// stability under bin doubling; atomic X(z) fails outright.
ConditionReport density_sup_estimate(const Scenario& scenario, long n, std::uint64_t seed);

// Condition 5 on a coarse (x, z) grid; pass iff every non-degenerate cell has
// |corr| <= 3 stderr.
ConditionReport condition5_grid(const Scenario& scenario,
                                const std::vector<double>& x_grid_coarse, long n,
                                std::uint64_t seed);

// Condition 6 (advisory): singular spectrum of the design matrix; numerical
// rank at relative tolerance 1e-6. Hard fail only on rank < 2 or A ~ 0.
ConditionReport completeness_spectrum(const Eigen::MatrixXd& A);

struct RateCheck {
    double slope = 0.0;
    bool pass = false;
    bool exact_match = false; // all differences at noise floor, slope undefined
    std::vector<double> sigmas;
    std::vector<double> errors;
};

// |mu_sigma(z) - mu(z)| over a sigma ladder with common random numbers;
// pass iff the log-log slope lies in [1.7, 2.3].
RateCheck rate_check_sigma(const Scenario& scenario, double z,
                           const std::vector<double>& sigma_ladder, long n,
                           std::uint64_t seed);

// |E Phi((x - X(z)) / sigma) Y1(x) - P(X(z) <= x) theta(x)| over the ladder;
// pass iff the slope is >= 0.4 (or the differences vanish identically).
RateCheck rate_check_phi(const Scenario& scenario, double x, double z,
                         const std::vector<double>& sigma_ladder, long n,
                         std::uint64_t seed);

struct ErrorMetrics {
    double rel_l2 = 0.0;
    double rel_linf = 0.0;
};

// Quadrature-weighted relative L2 and pointwise Linf over the central
// fraction of the grid (by index).
ErrorMetrics error_metrics(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& theta_true,
                           const QuadratureGrid& grid, double central_fraction);

} // namespace ivtheta
