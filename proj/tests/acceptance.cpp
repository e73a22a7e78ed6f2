// Acceptance suite: end-to-end checks at full scale, one pass/fail line each.
#include "ivtheta/diagnostics.hpp"
#include "ivtheta/estimation.hpp"
#include "ivtheta/pipeline.hpp"
#include "ivtheta/sampling.hpp"
#include "ivtheta/solver.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace ivtheta;
namespace fs = std::filesystem;

namespace {

struct Pipeline {
    SampleSet ss;
    QuadratureGrid grid;
    KernelMatrix km;
    RhsVector rhs;
    Eigen::MatrixXd A;
};

Pipeline run_pipeline(const Scenario& sc, int n, std::uint64_t seed) {
    Pipeline p;
    p.ss = draw_sample_set(sc, n, seed);
    p.grid = make_grid(p.ss, 201, 0.1);
    p.km = build_kernel(p.ss, p.grid.x_grid, sc.baseline_z);
    p.rhs = build_rhs(p.ss, sc.baseline_z);
    p.A = assemble_system(p.km, p.grid);
    return p;
}

Eigen::VectorXd truth_on_grid(const Scenario& sc, const QuadratureGrid& grid) {
    Eigen::VectorXd t(static_cast<Eigen::Index>(grid.x_grid.size()));
    for (Eigen::Index j = 0; j < t.size(); ++j)
        t[j] = true_theta(sc, grid.x_grid[static_cast<std::size_t>(j)]);
    return t;
}

bool criterion_forward_consistency() {
    auto p = run_pipeline(scenario_s1(), 200000, 1001);
    Eigen::VectorXd pred = forward_apply(p.A, truth_on_grid(scenario_s1(), p.grid));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < pred.size(); ++i)
        worst = std::max(worst, std::abs(pred[i] - p.rhs.values[i]) / p.rhs.noise_scale[i]);
    bool pass = worst <= 3.0;
    std::printf("1 forward consistency (kernel * true effect vs rhs): %s  "
                "(max |dev|/noise = %.2f, limit 3)\n",
                pass ? "PASS" : "FAIL", worst);
    return pass;
}

bool criterion_inverse_recovery() {
    int ok = 0;
    std::ostringstream per_seed;
    for (std::uint64_t seed : {11u, 22u, 33u, 44u, 55u}) {
        auto p = run_pipeline(scenario_s1(), 200000, seed);
        auto sel = select_lambda(p.A, p.rhs, LambdaMethod::Discrepancy,
                                 PenaltyKind::SecondDifference, p.grid);
        auto sol = solve_tikhonov(p.A, p.rhs.values, sel.lambda,
                                  PenaltyKind::SecondDifference, p.grid);
        double rel =
            error_metrics(sol.theta, truth_on_grid(scenario_s1(), p.grid), p.grid, 0.8).rel_l2;
        if (rel <= 0.10) ++ok;
        per_seed << ' ' << std::round(rel * 1000.0) / 1000.0;
    }
    bool pass = ok >= 4;
    std::printf("2 inverse recovery (rel L2 <= 0.10 on central 80%%, >=4/5 seeds): %s  "
                "(%d/5 seeds, rel L2 per seed:%s)\n",
                pass ? "PASS" : "FAIL", ok, per_seed.str().c_str());
    return pass;
}

bool criterion_null_effect() {
    auto p = run_pipeline(scenario_null(), 100000, 2024);
    auto sel = select_lambda(p.A, p.rhs, LambdaMethod::Discrepancy,
                             PenaltyKind::SecondDifference, p.grid);
    auto sol =
        solve_tikhonov(p.A, p.rhs.values, sel.lambda, PenaltyKind::SecondDifference, p.grid);
    double op = solution_operator_norm(p.A, sel.lambda, PenaltyKind::SecondDifference, p.grid);
    double bound = 5.0 * op * p.rhs.noise_scale.norm();
    double sup = sol.theta.cwiseAbs().maxCoeff();
    bool pass = sup <= bound;
    std::printf("3 null effect (|theta_hat|_inf within propagated noise bound): %s  "
                "(sup = %.3g, bound = %.3g)\n",
                pass ? "PASS" : "FAIL", sup, bound);
    return pass;
}

bool criterion_rate_sigma() {
    auto rc = rate_check_sigma(scenario_s1(), 1.0, {0.4, 0.2, 0.1, 0.05}, 1000000, 77);
    bool pass = rc.pass && rc.slope >= 1.7 && rc.slope <= 2.3;
    std::printf("4 smoothing-bias rate in sigma (slope in [1.7, 2.3]): %s  (slope = %.3f)\n",
                pass ? "PASS" : "FAIL", rc.slope);
    return pass;
}

bool criterion_rate_phi() {
    auto rc = rate_check_phi(scenario_s1(), 0.0, 1.0, {0.4, 0.2, 0.1, 0.05}, 1000000, 78);
    bool pass = rc.pass && rc.slope >= 0.4;
    std::printf("5 indicator-smoothing rate (slope >= 0.4): %s  (slope = %.3f)\n",
                pass ? "PASS" : "FAIL", rc.slope);
    return pass;
}

bool criterion_antiderivative_identity() {
    Scenario sc = scenario_s1();
    auto p = run_pipeline(sc, 200000, 909);
    Eigen::VectorXd lam = antiderivative(truth_on_grid(sc, p.grid), p.grid, 0.0);

    auto group_mean_lambda = [&](double z) {
        const auto& g = p.ss.group(z);
        double s = 0.0;
        for (const auto& o : g) s += eval_on_grid(p.grid, lam, o.x);
        return s / static_cast<double>(g.size());
    };
    double base = group_mean_lambda(sc.baseline_z);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.km.z_levels.size(); ++i) {
        double lhs = group_mean_lambda(p.km.z_levels[i]) - base;
        worst = std::max(worst, std::abs(lhs - p.rhs.values[static_cast<Eigen::Index>(i)]) /
                                    p.rhs.noise_scale[static_cast<Eigen::Index>(i)]);
    }
    bool pass = worst <= 3.0;
    std::printf("6 antiderivative identity (mean-difference vs rhs, all levels): %s  "
                "(max |dev|/noise = %.2f, limit 3)\n",
                pass ? "PASS" : "FAIL", worst);
    return pass;
}

bool criterion_condition_reports() {
    const std::vector<double> xs = {-2.0, -1.0, 0.0, 1.0, 2.0};

    auto c5_indep = condition5_grid(scenario_s1(), xs, 20000, 501);
    Scenario coupled = scenario_s1();
    coupled.u1_v_coupling = 0.9;
    auto c5_dep = condition5_grid(coupled, xs, 100000, 502);

    auto c6_zero = completeness_spectrum(Eigen::MatrixXd::Zero(5, 50));
    Scenario single = scenario_s1();
    single.z_levels = {0.0, 1.0};
    auto ps = run_pipeline(single, 5000, 503);
    auto c6_single = completeness_spectrum(ps.A);
    auto p = run_pipeline(scenario_s1(), 20000, 504);
    auto c6_s1 = completeness_spectrum(p.A);

    auto c3_cont = density_sup_estimate(scenario_s1(), 50000, 505);
    Scenario atom = scenario_s1();
    atom.v[0] = DistributionSpec::point_mass(0.0);
    auto c3_atom = density_sup_estimate(atom, 5000, 506);

    bool pass = c5_indep.pass && !c5_dep.pass && !c6_zero.pass && !c6_single.pass &&
                c6_s1.pass && c3_cont.pass && !c3_atom.pass;
    std::printf("7 condition reports (independence/coupling, spectrum, density): %s  "
                "(c5 %d/%d, c6 %d/%d/%d, c3 %d/%d)\n",
                pass ? "PASS" : "FAIL", c5_indep.pass, c5_dep.pass, c6_zero.pass,
                c6_single.pass, c6_s1.pass, c3_cont.pass, c3_atom.pass);
    return pass;
}

bool criterion_solver_oracles() {
    std::mt19937_64 rng(4711);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const int m = 20, J = 30;
        QuadratureGrid grid;
        for (int j = 0; j < J; ++j) {
            grid.x_grid.push_back(0.1 * j);
            grid.weights.push_back(j == 0 || j == J - 1 ? 0.05 : 0.1);
        }
        Eigen::MatrixXd A(m, J);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < J; ++j) A(i, j) = nd(rng);
        Eigen::VectorXd b(m);
        for (int i = 0; i < m; ++i) b[i] = nd(rng);
        for (auto pk : {PenaltyKind::Identity, PenaltyKind::SecondDifference}) {
            Eigen::MatrixXd L = penalty_operator(pk, grid);
            for (double lam : {1e-2, 0.1, 1.0}) {
                auto sol = solve_tikhonov(A, b, lam, pk, grid);
                Eigen::VectorXd ne = (A.transpose() * A + lam * lam * L.transpose() * L)
                                         .ldlt()
                                         .solve(A.transpose() * b);
                worst = std::max(worst, (sol.theta - ne).norm() / ne.norm());
            }
        }
    }

    auto p = run_pipeline(scenario_s1(), 20000, 4711);
    auto sel = select_lambda(p.A, p.rhs, LambdaMethod::Discrepancy,
                             PenaltyKind::SecondDifference, p.grid);
    bool monotone = true;
    for (std::size_t k = 1; k < sel.ladder.size(); ++k) {
        if (sel.residual_norms[k] < sel.residual_norms[k - 1] * (1.0 - 1e-9)) monotone = false;
        if (sel.seminorms[k] > sel.seminorms[k - 1] * (1.0 + 1e-9)) monotone = false;
    }
    bool pass = worst <= 1e-8 && monotone;
    std::printf("8 solver oracles (SVD vs normal equations, ladder monotone): %s  "
                "(max rel dev = %.2e, monotone = %d)\n",
                pass ? "PASS" : "FAIL", worst, monotone);
    return pass;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool criterion_determinism() {
    fs::path root = fs::temp_directory_path() / "ivtheta_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    nlohmann::json j;
    j["scenario"] = scenario_s1();
    j["n_per_level"] = 2000;
    j["seed"] = 7;
    fs::path cfg = root / "run.json";
    std::ofstream(cfg) << j.dump(2);

    for (const char* sub : {"a", "b"}) {
        RunConfig c = load_config(cfg, std::nullopt, root / sub);
        cmd_simulate(c, true);
        cmd_estimate(c, std::nullopt, true);
        cmd_solve(c, std::nullopt, std::nullopt, true);
    }
    bool pass = true;
    for (const char* f : {"samples.csv", "kernel.csv", "rhs.csv", "theta.csv", "solution.json"})
        pass = pass && slurp(root / "a" / f) == slurp(root / "b" / f);
    std::printf("9 determinism (byte-identical pipeline artifacts across runs): %s\n",
                pass ? "PASS" : "FAIL");
    return pass;
}

} // namespace

int main() {
    int failed = 0;
    failed += !criterion_forward_consistency();
    failed += !criterion_inverse_recovery();
    failed += !criterion_null_effect();
    failed += !criterion_rate_sigma();
    failed += !criterion_rate_phi();
    failed += !criterion_antiderivative_identity();
    failed += !criterion_condition_reports();
    failed += !criterion_solver_oracles();
    failed += !criterion_determinism();
    std::printf("acceptance: %d/9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
