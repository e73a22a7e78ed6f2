#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ivtheta/diagnostics.hpp"
#include "ivtheta/estimation.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace ivtheta;

namespace {

// high-resolution histogram sup density over all levels, test-side oracle
double sup_density_oracle(const Scenario& sc, long n, std::uint64_t seed) {
    std::vector<std::vector<double>> draws;
    double lo = 1e300, hi = -1e300;
    for (double z : sc.z_levels) {
        draws.push_back(oracles::x_draws_mc(sc, z, n, seed++));
        for (double x : draws.back()) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    const int bins = 400;
    double w = (hi - lo) / bins;
    double sup = 0.0;
    for (const auto& level : draws) {
        std::vector<long> counts(bins, 0);
        for (double x : level) {
            int b = std::clamp(static_cast<int>((x - lo) / w), 0, bins - 1);
            ++counts[static_cast<std::size_t>(b)];
        }
        for (long c : counts)
            sup = std::max(sup, static_cast<double>(c) /
                                    (static_cast<double>(level.size()) * w));
    }
    return sup;
}

} // namespace

TEST_CASE("condition 3: bounded density of X(z) for the smooth g family") {
    Scenario s = scenario_s1();
    auto rep = density_sup_estimate(s, 50000, 31);
    CHECK(rep.condition == 3);
    CHECK(rep.pass);

    double est = rep.statistics.at("sup_density");
    double oracle = sup_density_oracle(s, 1000000, 77);
    CHECK(std::abs(est - oracle) <= 0.15);

    // analytic bound: sup phi / min s' = 0.3989 / 0.5
    CHECK(est <= 0.80);
    CHECK(rep.statistics.at("doubling_ratio") < 2.0);
}

TEST_CASE("condition 3: atomic X(z) fails") {
    Scenario s = scenario_s1();
    s.v[0] = DistributionSpec::point_mass(0.3);
    auto rep = density_sup_estimate(s, 5000, 2);
    CHECK(!rep.pass);
    CHECK(rep.details.find("atomic X(z)") != std::string::npos);
    CHECK(std::isinf(rep.statistics.at("sup_density")));
}

TEST_CASE("condition 3: statistic stable when n doubles") {
    Scenario s = scenario_s1();
    double a = density_sup_estimate(s, 20000, 5).statistics.at("sup_density");
    double b = density_sup_estimate(s, 40000, 5).statistics.at("sup_density");
    CHECK(std::abs(a - b) / b <= 0.10);
}

TEST_CASE("condition 5 grid: independence passes, coupling fails") {
    const std::vector<double> xs = {-2.0, -1.0, 0.0, 1.0, 2.0};

    Scenario s = scenario_s1();
    auto rep = condition5_grid(s, xs, 20000, 11);
    CHECK(rep.condition == 5);
    CHECK(rep.pass);

    // constant potential-outcome derivative: every cell degenerate, trivially ok
    Scenario pm = scenario_s1();
    pm.u1 = DistributionSpec::point_mass(0.5);
    auto rp = condition5_grid(pm, xs, 5000, 11);
    CHECK(rp.pass);
    CHECK(rp.statistics.at("degenerate_cells") == 25.0);

    Scenario cp = scenario_s1();
    cp.u1_v_coupling = 0.9;
    auto rc = condition5_grid(cp, xs, 100000, 11);
    CHECK(!rc.pass);
    CHECK(rc.statistics.at("max_abs_corr_over_stderr") > 3.0);

    CHECK_THROWS_AS(condition5_grid(s, {}, 1000, 1), ValidationError);
}

TEST_CASE("condition 6: spectrum flags degenerate instruments") {
    auto zero = completeness_spectrum(Eigen::MatrixXd::Zero(5, 20));
    CHECK(!zero.pass);
    CHECK(zero.details.find("no instrument") != std::string::npos);

    Eigen::MatrixXd one_row = Eigen::MatrixXd::Random(1, 20);
    auto single = completeness_spectrum(one_row);
    CHECK(!single.pass);
    CHECK(single.details.find("insufficient-levels") != std::string::npos);

    // rank-1 matrix with several rows
    Eigen::MatrixXd r1 = Eigen::VectorXd::Ones(5) * Eigen::RowVectorXd::Random(20);
    auto collapsed = completeness_spectrum(r1);
    CHECK(!collapsed.pass);
    CHECK(collapsed.statistics.at("numerical_rank") == 1.0);
}

TEST_CASE("condition 6: S1 design matrix has usable rank") {
    Scenario s = scenario_s1();
    SampleSet ss = draw_sample_set(s, 20000, 8);
    QuadratureGrid grid = make_grid(ss, 201, 0.1);
    KernelMatrix km = build_kernel(ss, grid.x_grid);
    Eigen::MatrixXd A = assemble_system(km, grid);

    auto rep = completeness_spectrum(A);
    CHECK(rep.pass);
    CHECK(rep.statistics.at("numerical_rank") >= 5.0);
}

TEST_CASE("rate check (smoothing bias in sigma): quadratic convergence") {
    Scenario s = scenario_s1();
    const std::vector<double> ladder = {0.4, 0.2, 0.1, 0.05};

    auto rc = rate_check_sigma(s, 1.0, ladder, 200000, 21);
    CHECK(!rc.exact_match);
    CHECK(rc.pass);
    CHECK(rc.slope >= 1.7);
    CHECK(rc.slope <= 2.3);

    // halving the ladder start must not flip the verdict
    auto rh = rate_check_sigma(s, 1.0, {0.2, 0.1, 0.05, 0.025}, 200000, 21);
    CHECK(rh.pass == rc.pass);

    // outcome constant in x: smoothing changes nothing
    Scenario flat = scenario_s1();
    flat.u1 = DistributionSpec::point_mass(0.0);
    auto re = rate_check_sigma(flat, 1.0, ladder, 2000, 21);
    CHECK(re.exact_match);
    CHECK(re.pass);

    CHECK_THROWS_AS(rate_check_sigma(s, 1.0, {0.4, 0.2}, 1000, 1), ValidationError);
}

TEST_CASE("rate check (indicator smoothing): slope at least 0.4") {
    Scenario s = scenario_s1();
    const std::vector<double> ladder = {0.4, 0.2, 0.1, 0.05};

    auto rc = rate_check_phi(s, 0.0, 1.0, ladder, 200000, 33);
    CHECK(!rc.exact_match);
    CHECK(rc.pass);
    CHECK(rc.slope >= 0.4);

    Scenario flat = scenario_s1();
    flat.u1 = DistributionSpec::point_mass(0.0);
    auto re = rate_check_phi(flat, 0.0, 1.0, ladder, 2000, 33);
    CHECK(re.exact_match);
    CHECK(re.pass);

    CHECK_THROWS_AS(rate_check_phi(s, 0.0, 1.0, {0.4}, 1000, 1), ValidationError);
}

TEST_CASE("rate check (indicator smoothing): estimates stable as n grows") {
    Scenario s = scenario_s1();
    const std::vector<double> ladder = {0.4, 0.2, 0.1};
    long n = 50000;
    auto ra = rate_check_phi(s, 0.0, 1.0, ladder, n, 14);
    auto rb = rate_check_phi(s, 0.0, 1.0, ladder, 4 * n, 14);

    // per-draw spread of the estimator, from an independent oracle sample
    std::mt19937_64 rng(99);
    double theta0 = true_theta(s, 0.0);
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        double sum = 0.0, sumsq = 0.0;
        const long m = 20000;
        for (long i = 0; i < m; ++i) {
            auto nd = oracles::draw_noise_oracle(s, rng);
            double xz = s.g_eval(1.0, nd.v);
            double d = normal_cdf((0.0 - xz) / ladder[k]) * s.dfdx(0.0, nd.u1) -
                       (xz <= 0.0 ? theta0 : 0.0);
            sum += d;
            sumsq += d * d;
        }
        double sd = std::sqrt(std::max(0.0, sumsq / m - (sum / m) * (sum / m)));
        double bound = 3.0 * sd * (1.0 / std::sqrt(static_cast<double>(n)) +
                                   1.0 / std::sqrt(4.0 * static_cast<double>(n)));
        CHECK(std::abs(ra.errors[k] - rb.errors[k]) <= bound);
    }
}

TEST_CASE("error metrics: exactness and homogeneity") {
    QuadratureGrid grid;
    for (int j = 0; j <= 20; ++j) {
        grid.x_grid.push_back(j * 0.1);
        grid.weights.push_back(j == 0 || j == 20 ? 0.05 : 0.1);
    }
    Eigen::VectorXd t(21);
    for (int j = 0; j <= 20; ++j) t[j] = std::sin(0.3 * j) + 0.2;

    auto zero = error_metrics(t, t, grid, 0.8);
    CHECK(zero.rel_l2 == 0.0);
    CHECK(zero.rel_linf == 0.0);

    auto scaled = error_metrics(1.1 * t, t, grid, 0.8);
    CHECK(scaled.rel_l2 == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(scaled.rel_linf == doctest::Approx(0.1).epsilon(1e-12));

    Eigen::VectorXd wrong(5);
    CHECK_THROWS_AS(error_metrics(wrong, t, grid, 0.8), DataError);
    CHECK_THROWS_AS(error_metrics(t, t, grid, 0.0), ValidationError);
}

TEST_CASE("diagnostics are deterministic given seeds") {
    Scenario s = scenario_s1();
    auto a = rate_check_phi(s, 0.0, 1.0, {0.4, 0.2, 0.1}, 20000, 5);
    auto b = rate_check_phi(s, 0.0, 1.0, {0.4, 0.2, 0.1}, 20000, 5);
    CHECK(a.slope == b.slope);
    CHECK(a.errors == b.errors);

    auto c = density_sup_estimate(s, 10000, 5);
    auto d = density_sup_estimate(s, 10000, 5);
    CHECK(c.statistics.at("sup_density") == d.statistics.at("sup_density"));
}
