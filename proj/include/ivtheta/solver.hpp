#pragma once

#include "ivtheta/estimation.hpp"
#include "ivtheta/sample_set.hpp"

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace ivtheta {

enum class PenaltyKind { Identity, SecondDifference };

std::string penalty_to_string(PenaltyKind p);
PenaltyKind penalty_from_string(const std::string& s);

struct QuadratureGrid {
    std::vector<double> x_grid;  // strictly increasing
    std::vector<double> weights; // trapezoid weights, sum = span

    double span() const { return x_grid.back() - x_grid.front(); }
};

struct RegularizedSolution {
    Eigen::VectorXd theta;
    double lambda = 0.0;
    PenaltyKind penalty_kind = PenaltyKind::SecondDifference;
    double residual_norm = 0.0;
    double solution_seminorm = 0.0;
    std::vector<double> singular_values; // of the design matrix, nonincreasing
    std::optional<int> truncation_rank;  // lambda = 0 path only
};

// Uniform grid spanning the pooled 0.1%..99.9% sample quantiles padded by
// pad_fraction of that range, with trapezoid weights.
QuadratureGrid make_grid(const SampleSet& sample_set, int j_points, double pad_fraction);

// A[i][j] = K(z_i, x_j) w_j, so A theta approximates integral K theta dx per level.
Eigen::MatrixXd assemble_system(const KernelMatrix& kernel, const QuadratureGrid& grid);

// Scaled second-difference operator ((J-2) x J, entries {1,-2,1}/h^2):
// row j approximates theta''(x_{j+1}).
Eigen::MatrixXd penalty_operator(PenaltyKind penalty, const QuadratureGrid& grid);

// Minimizes |A theta - b|^2 + lambda^2 |L theta|^2 via SVD of the stacked
// system; lambda = 0 falls back to minimum-norm least squares by truncated
// SVD with relative tolerance 1e-12.
RegularizedSolution solve_tikhonov(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   double lambda, PenaltyKind penalty,
                                   const QuadratureGrid& grid);

enum class LambdaMethod { Discrepancy, LCurve };

struct LambdaSelection {
    double lambda = 0.0;
    LambdaMethod method_used = LambdaMethod::Discrepancy;
    bool zero_noise_warning = false;
    std::vector<double> ladder;
    std::vector<double> residual_norms;
    std::vector<double> seminorms;
};

// 64-value logarithmic ladder from 1e-8 * sigma_1 to sigma_1. Discrepancy:
// smallest lambda with residual >= |noise_scale|_2 (ties toward smaller
// lambda); l-curve: maximum curvature of (log residual, log seminorm).
LambdaSelection select_lambda(const Eigen::MatrixXd& A, const RhsVector& rhs,
                              LambdaMethod method, PenaltyKind penalty,
                              const QuadratureGrid& grid);

Eigen::VectorXd forward_apply(const Eigen::MatrixXd& A, const Eigen::VectorXd& theta);

// lambda(x_j) = a - integral_{x_j}^{x_max} theta(t) dt by trapezoid on the
// grid; the tail beyond the grid is taken as 0.
Eigen::VectorXd antiderivative(const Eigen::VectorXd& theta, const QuadratureGrid& grid,
                               double a);

// Piecewise-linear evaluation of a grid function, clamped to the end values.
double eval_on_grid(const QuadratureGrid& grid, const Eigen::VectorXd& values, double x);

// Operator norm of the map b -> theta at the given lambda (for propagating
// RHS noise into the solution).
double solution_operator_norm(const Eigen::MatrixXd& A, double lambda, PenaltyKind penalty,
                              const QuadratureGrid& grid);

} // namespace ivtheta
