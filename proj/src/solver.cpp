#include "ivtheta/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>

namespace ivtheta {

std::string penalty_to_string(PenaltyKind p) {
    return p == PenaltyKind::Identity ? "identity" : "second-difference";
}

PenaltyKind penalty_from_string(const std::string& s) {
    if (s == "identity") return PenaltyKind::Identity;
    if (s == "second-difference") return PenaltyKind::SecondDifference;
    throw ValidationError("unknown penalty kind: " + s);
}

QuadratureGrid make_grid(const SampleSet& sample_set, int j_points, double pad_fraction) {
    if (j_points < 11) throw ValidationError("make_grid: j_points must be >= 11");

    std::vector<double> pooled;
    for (const auto& g : sample_set.groups)
        for (const auto& o : g) pooled.push_back(o.x);
    std::set<double> distinct(pooled.begin(), pooled.end());
    if (distinct.size() < 2)
        throw DataError("make_grid: need at least 2 distinct x values");
    std::sort(pooled.begin(), pooled.end());

    const auto n = pooled.size();
    auto lo_idx = static_cast<std::size_t>(std::floor(0.001 * static_cast<double>(n - 1)));
    auto hi_idx = static_cast<std::size_t>(std::ceil(0.999 * static_cast<double>(n - 1)));
    double lo = pooled[lo_idx];
    double hi = pooled[hi_idx];
    double pad = pad_fraction * (hi - lo);
    lo -= pad;
    hi += pad;

    QuadratureGrid grid;
    grid.x_grid.resize(static_cast<std::size_t>(j_points));
    grid.weights.resize(static_cast<std::size_t>(j_points));
    double h = (hi - lo) / static_cast<double>(j_points - 1);
    for (int j = 0; j < j_points; ++j) {
        grid.x_grid[static_cast<std::size_t>(j)] = lo + h * j;
        grid.weights[static_cast<std::size_t>(j)] =
            (j == 0 || j == j_points - 1) ? 0.5 * h : h;
    }
    grid.x_grid.back() = hi; // exact endpoint
    return grid;
}

Eigen::MatrixXd assemble_system(const KernelMatrix& kernel, const QuadratureGrid& grid) {
    if (kernel.x_grid != grid.x_grid)
        throw DataError("assemble_system: kernel x_grid does not match quadrature grid");
    Eigen::MatrixXd A = kernel.entries;
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        A.col(j) *= grid.weights[static_cast<std::size_t>(j)];
    return A;
}

Eigen::MatrixXd penalty_operator(PenaltyKind penalty, const QuadratureGrid& grid) {
    const auto J = static_cast<Eigen::Index>(grid.x_grid.size());
    if (penalty == PenaltyKind::Identity)
        return Eigen::MatrixXd::Identity(J, J);
    double h = (grid.x_grid.back() - grid.x_grid.front()) /
               static_cast<double>(grid.x_grid.size() - 1);
    double s = 1.0 / (h * h);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(J - 2, J);
    for (Eigen::Index r = 0; r < J - 2; ++r) {
        L(r, r) = s;
        L(r, r + 1) = -2.0 * s;
        L(r, r + 2) = s;
    }
    return L;
}

RegularizedSolution solve_tikhonov(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   double lambda, PenaltyKind penalty,
                                   const QuadratureGrid& grid) {
    if (A.rows() != b.size())
        throw DataError("solve_tikhonov: dimension mismatch between A and b");
    if (A.cols() != static_cast<Eigen::Index>(grid.x_grid.size()))
        throw DataError("solve_tikhonov: A columns do not match grid size");
    if (!(lambda >= 0.0))
        throw ValidationError("solve_tikhonov: lambda must be >= 0");

    Eigen::BDCSVD<Eigen::MatrixXd> svdA(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double sigma1 = svdA.singularValues().size() ? svdA.singularValues()(0) : 0.0;
    if (sigma1 <= 0.0 && b.norm() > 0.0)
        throw NumericalError("degenerate instrument: design matrix is zero but RHS is not");

    RegularizedSolution sol;
    sol.lambda = lambda;
    sol.penalty_kind = penalty;
    sol.singular_values.assign(svdA.singularValues().data(),
                               svdA.singularValues().data() + svdA.singularValues().size());

    Eigen::MatrixXd L = penalty_operator(penalty, grid);
    if (lambda == 0.0) {
        svdA.setThreshold(1e-12);
        sol.theta = svdA.solve(b);
        sol.truncation_rank = static_cast<int>(svdA.rank());
    } else if (penalty == PenaltyKind::Identity) {
        // standard form: Tikhonov filter factors on the SVD of A
        const auto& sv = svdA.singularValues();
        Eigen::VectorXd c = svdA.matrixU().transpose() * b;
        for (Eigen::Index i = 0; i < c.size(); ++i)
            c[i] *= sv[i] > 1e-12 * sigma1 ? sv[i] / (sv[i] * sv[i] + lambda * lambda) : 0.0;
        sol.theta = svdA.matrixV() * c;
    } else {
        // transform to standard form (Elden): split theta into the affine
        // null space of L, fitted by unregularized least squares, and the
        // seminorm-carrying part, filtered in the SVD basis
        const auto J = A.cols();
        Eigen::MatrixXd W(J, 2);
        for (Eigen::Index j = 0; j < J; ++j) {
            W(j, 0) = 1.0;
            W(j, 1) = grid.x_grid[static_cast<std::size_t>(j)];
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qrW(W);
        W = qrW.householderQ() * Eigen::MatrixXd::Identity(J, 2);

        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> codL(L);
        Eigen::MatrixXd Lp = codL.pseudoInverse();

        Eigen::MatrixXd E = A * W;
        Eigen::BDCSVD<Eigen::MatrixXd> svdE(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svdE.setThreshold(1e-12);
        Eigen::MatrixXd EpA = svdE.solve(A);
        Eigen::VectorXd Epb = svdE.solve(b);

        Eigen::MatrixXd LpA = Lp - W * (EpA * Lp); // A-weighted inverse of L
        Eigen::VectorXd x0 = W * Epb;

        Eigen::MatrixXd Abar = A * LpA;
        Eigen::VectorXd bbar = b - A * x0;
        Eigen::BDCSVD<Eigen::MatrixXd> svdS(Abar, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svdS.singularValues();
        double smax = sv.size() ? sv[0] : 0.0;
        Eigen::VectorXd c = svdS.matrixU().transpose() * bbar;
        for (Eigen::Index i = 0; i < c.size(); ++i)
            c[i] *= sv[i] > 1e-12 * smax ? sv[i] / (sv[i] * sv[i] + lambda * lambda) : 0.0;
        sol.theta = LpA * (svdS.matrixV() * c) + x0;
    }
    sol.residual_norm = (A * sol.theta - b).norm();
    sol.solution_seminorm = (L * sol.theta).norm();
    return sol;
}

namespace {

std::vector<double> lambda_ladder(double sigma1) {
    constexpr int kLadder = 64;
    std::vector<double> ladder(kLadder);
    double lo = std::log(1e-8 * sigma1), hi = std::log(sigma1);
    for (int k = 0; k < kLadder; ++k)
        ladder[static_cast<std::size_t>(k)] =
            std::exp(lo + (hi - lo) * static_cast<double>(k) / (kLadder - 1));
    return ladder;
}

// Menger curvature of three consecutive points in the (log r, log s) plane.
double curvature(double x0, double y0, double x1, double y1, double x2, double y2) {
    double a = std::hypot(x1 - x0, y1 - y0);
    double b = std::hypot(x2 - x1, y2 - y1);
    double c = std::hypot(x2 - x0, y2 - y0);
    double cross = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
    double denom = a * b * c;
    return denom > 0.0 ? 2.0 * std::abs(cross) / denom : 0.0;
}

} // namespace

LambdaSelection select_lambda(const Eigen::MatrixXd& A, const RhsVector& rhs,
                              LambdaMethod method, PenaltyKind penalty,
                              const QuadratureGrid& grid) {
    Eigen::BDCSVD<Eigen::MatrixXd> svdA(A);
    double sigma1 = svdA.singularValues().size() ? svdA.singularValues()(0) : 0.0;
    if (sigma1 <= 0.0)
        throw NumericalError("degenerate instrument: design matrix is zero");

    LambdaSelection sel;
    sel.method_used = method;
    sel.ladder = lambda_ladder(sigma1);
    for (double lam : sel.ladder) {
        RegularizedSolution s = solve_tikhonov(A, rhs.values, lam, penalty, grid);
        sel.residual_norms.push_back(s.residual_norm);
        sel.seminorms.push_back(s.solution_seminorm);
    }

    double noise = rhs.noise_scale.size() ? rhs.noise_scale.norm() : 0.0;
    if (method == LambdaMethod::Discrepancy && noise == 0.0)
        sel.zero_noise_warning = true;

    if (method == LambdaMethod::Discrepancy) {
        // smallest lambda whose residual reaches the noise level; a zero
        // noise level degenerates to the ladder minimum
        for (std::size_t k = 0; k < sel.ladder.size(); ++k) {
            if (sel.residual_norms[k] >= noise) {
                sel.lambda = sel.ladder[k];
                return sel;
            }
        }
        sel.lambda = sel.ladder.back();
        return sel;
    }

    // l-curve: maximum Menger curvature in log-log coordinates
    constexpr double kFloor = 1e-300;
    std::vector<double> lr, ls;
    for (std::size_t k = 0; k < sel.ladder.size(); ++k) {
        lr.push_back(std::log(std::max(sel.residual_norms[k], kFloor)));
        ls.push_back(std::log(std::max(sel.seminorms[k], kFloor)));
    }
    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 1; k + 1 < sel.ladder.size(); ++k) {
        double c = curvature(lr[k - 1], ls[k - 1], lr[k], ls[k], lr[k + 1], ls[k + 1]);
        if (c > best) {
            best = c;
            best_k = k;
        }
    }
    sel.lambda = sel.ladder[best_k];
    return sel;
}

Eigen::VectorXd forward_apply(const Eigen::MatrixXd& A, const Eigen::VectorXd& theta) {
    if (A.cols() != theta.size())
        throw DataError("forward_apply: dimension mismatch");
    return A * theta;
}

Eigen::VectorXd antiderivative(const Eigen::VectorXd& theta, const QuadratureGrid& grid,
                               double a) {
    const auto J = static_cast<Eigen::Index>(grid.x_grid.size());
    if (theta.size() != J) throw DataError("antiderivative: dimension mismatch");
    Eigen::VectorXd lam(J);
    lam[J - 1] = a;
    for (Eigen::Index j = J - 2; j >= 0; --j) {
        double h = grid.x_grid[static_cast<std::size_t>(j + 1)] -
                   grid.x_grid[static_cast<std::size_t>(j)];
        lam[j] = lam[j + 1] - 0.5 * h * (theta[j] + theta[j + 1]);
    }
    return lam;
}

double eval_on_grid(const QuadratureGrid& grid, const Eigen::VectorXd& values, double x) {
    const auto& xs = grid.x_grid;
    if (values.size() != static_cast<Eigen::Index>(xs.size()))
        throw DataError("eval_on_grid: dimension mismatch");
    if (x <= xs.front()) return values[0];
    if (x >= xs.back()) return values[values.size() - 1];
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    auto j = static_cast<Eigen::Index>(it - xs.begin()) - 1;
    double t = (x - xs[static_cast<std::size_t>(j)]) /
               (xs[static_cast<std::size_t>(j + 1)] - xs[static_cast<std::size_t>(j)]);
    return (1.0 - t) * values[j] + t * values[j + 1];
}

double solution_operator_norm(const Eigen::MatrixXd& A, double lambda, PenaltyKind penalty,
                              const QuadratureGrid& grid) {
    const auto I = A.rows();
    Eigen::MatrixXd R(A.cols(), I);
    for (Eigen::Index i = 0; i < I; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(I);
        e[i] = 1.0;
        R.col(i) = solve_tikhonov(A, e, lambda, penalty, grid).theta;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(R);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

} // namespace ivtheta
