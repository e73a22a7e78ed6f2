#include "ivtheta/pipeline.hpp"

#include "ivtheta/diagnostics.hpp"
#include "ivtheta/sampling.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace ivtheta {

namespace {

using nlohmann::json;

json canonical_config_json(const RunConfig& c) {
    json j;
    j["scenario"] = c.scenario;
    j["n_per_level"] = c.n_per_level;
    j["seed"] = c.seed;
    j["grid"] = {{"j_points", c.grid.j_points}, {"pad_fraction", c.grid.pad_fraction}};
    j["solver"] = {{"penalty", penalty_to_string(c.solver.penalty)},
                   {"lambda", c.solver.lambda}};
    j["validate"] = {{"n_condition", c.validate.n_condition},
                     {"n_rate", c.validate.n_rate},
                     {"sigma_ladder", c.validate.sigma_ladder}};
    return j;
}

std::string hash_hex(const std::string& s) {
    std::uint64_t h = stream_id(s);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void note(bool quiet, const std::string& msg) {
    if (!quiet) std::cout << msg << "\n";
}

json report_rate(const RateCheck& rc) {
    json j;
    j["slope"] = rc.slope;
    j["pass"] = rc.pass;
    j["exact_match"] = rc.exact_match;
    j["sigmas"] = rc.sigmas;
    j["errors"] = rc.errors;
    return j;
}

json report_condition(const ConditionReport& r) {
    json j;
    j["condition"] = r.condition;
    j["pass"] = r.pass;
    j["details"] = r.details;
    j["statistics"] = r.statistics;
    return j;
}

} // namespace

RunConfig load_config(const std::filesystem::path& config_path,
                      std::optional<std::uint64_t> seed_override,
                      std::optional<std::filesystem::path> out_override) {
    if (!std::filesystem::exists(config_path))
        throw UsageError("config file does not exist: " + config_path.string());
    json j = read_json(config_path);

    RunConfig c;
    try {
        if (j.contains("scenario_file")) {
            auto sp = config_path.parent_path() / j.at("scenario_file").get<std::string>();
            if (!std::filesystem::exists(sp))
                throw DataError("scenario file does not exist: " + sp.string());
            c.scenario = read_json(sp).get<Scenario>();
        } else if (j.contains("scenario")) {
            c.scenario = j.at("scenario").get<Scenario>();
        } else {
            throw DataError("config needs 'scenario' or 'scenario_file'");
        }
        c.n_per_level = j.value("n_per_level", 10000);
        c.seed = j.value("seed", 1ull);
        if (j.contains("grid")) {
            c.grid.j_points = j["grid"].value("j_points", 201);
            c.grid.pad_fraction = j["grid"].value("pad_fraction", 0.1);
        }
        if (j.contains("solver")) {
            c.solver.penalty =
                penalty_from_string(j["solver"].value("penalty", "second-difference"));
            if (j["solver"].contains("lambda")) {
                const auto& jl = j["solver"]["lambda"];
                c.solver.lambda = jl.is_number()
                                      ? format_double(jl.get<double>())
                                      : jl.get<std::string>();
            }
        }
        if (j.contains("validate")) {
            c.validate.n_condition = j["validate"].value("n_condition", 20000l);
            c.validate.n_rate = j["validate"].value("n_rate", 100000l);
            if (j["validate"].contains("sigma_ladder"))
                c.validate.sigma_ladder =
                    j["validate"]["sigma_ladder"].get<std::vector<double>>();
        }
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
    } catch (const json::exception& e) {
        throw DataError(config_path.string() + ": bad config: " + e.what());
    }

    if (seed_override) c.seed = *seed_override;
    if (out_override) c.out = *out_override;
    c.scenario.validate();
    c.config_hash = hash_hex(canonical_config_json(c).dump());

    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    if (ec || !std::filesystem::is_directory(c.out))
        throw UsageError("output directory not writable: " + c.out.string());
    return c;
}

void cmd_simulate(const RunConfig& config, bool quiet) {
    SampleSet ss = draw_sample_set(config.scenario, config.n_per_level, config.seed);
    write_samples_csv(config.out / "samples.csv", ss, config.meta());
    note(quiet, "wrote " + (config.out / "samples.csv").string());
}

void cmd_estimate(const RunConfig& config, std::optional<std::filesystem::path> samples_path,
                  bool quiet) {
    auto sp = samples_path.value_or(config.out / "samples.csv");
    SampleSet ss = read_samples_csv(sp);
    QuadratureGrid grid = make_grid(ss, config.grid.j_points, config.grid.pad_fraction);
    KernelMatrix km = build_kernel(ss, grid.x_grid, config.scenario.baseline_z);
    RhsVector rhs = build_rhs(ss, config.scenario.baseline_z);
    write_kernel_csv(config.out / "kernel.csv", km, grid, config.meta());
    write_rhs_csv(config.out / "rhs.csv", km.z_levels, rhs, config.meta());
    note(quiet, "wrote " + (config.out / "kernel.csv").string() + ", " +
                    (config.out / "rhs.csv").string());
}

void cmd_solve(const RunConfig& config, std::optional<std::filesystem::path> kernel_path,
               std::optional<std::filesystem::path> rhs_path, bool quiet) {
    auto [km, grid] = read_kernel_csv(kernel_path.value_or(config.out / "kernel.csv"));
    auto [zs, rhs] = read_rhs_csv(rhs_path.value_or(config.out / "rhs.csv"));
    if (static_cast<Eigen::Index>(km.z_levels.size()) != rhs.values.size())
        throw DataError("kernel and rhs level counts do not match");

    Eigen::MatrixXd A = assemble_system(km, grid);
    double lambda;
    if (config.solver.lambda == "auto:discrepancy")
        lambda = select_lambda(A, rhs, LambdaMethod::Discrepancy, config.solver.penalty, grid)
                     .lambda;
    else if (config.solver.lambda == "auto:l-curve")
        lambda =
            select_lambda(A, rhs, LambdaMethod::LCurve, config.solver.penalty, grid).lambda;
    else
        try {
            lambda = std::stod(config.solver.lambda);
        } catch (const std::exception&) {
            throw DataError("solver.lambda must be a number, 'auto:discrepancy' or "
                            "'auto:l-curve'");
        }

    RegularizedSolution sol = solve_tikhonov(A, rhs.values, lambda, config.solver.penalty, grid);
    write_theta_csv(config.out / "theta.csv", grid, sol.theta, config.meta());
    write_solution_json(config.out / "solution.json", sol, config.meta());
    note(quiet, "wrote " + (config.out / "theta.csv").string() + ", " +
                    (config.out / "solution.json").string());
}

bool cmd_validate(const RunConfig& config, bool quiet) {
    const Scenario& sc = config.scenario;
    SampleSet ss = draw_sample_set(sc, config.n_per_level, config.seed);
    QuadratureGrid grid = make_grid(ss, config.grid.j_points, config.grid.pad_fraction);
    KernelMatrix km = build_kernel(ss, grid.x_grid, sc.baseline_z);
    RhsVector rhs = build_rhs(ss, sc.baseline_z);
    Eigen::MatrixXd A = assemble_system(km, grid);

    json rep;
    rep["meta"] = {{"seed", config.seed},
                   {"config_hash", config.config_hash},
                   {"scenario_id", sc.id}};

    // forward consistency: A applied to the analytic effect vs the estimated RHS
    Eigen::VectorXd theta_true(A.cols());
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        theta_true[j] = true_theta(sc, grid.x_grid[static_cast<std::size_t>(j)]);
    Eigen::VectorXd pred = forward_apply(A, theta_true);
    bool fwd_pass = true;
    json fwd_levels = json::array();
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        double dev = std::abs(pred[i] - rhs.values[i]);
        bool ok = dev <= 3.0 * rhs.noise_scale[i];
        fwd_pass = fwd_pass && ok;
        fwd_levels.push_back({{"z", km.z_levels[static_cast<std::size_t>(i)]},
                              {"predicted", pred[i]},
                              {"observed", rhs.values[i]},
                              {"noise_scale", rhs.noise_scale[i]},
                              {"pass", ok}});
    }
    rep["forward_consistency"] = {{"pass", fwd_pass}, {"levels", fwd_levels}};

    auto c3 = density_sup_estimate(sc, config.validate.n_condition, config.seed + 101);
    std::vector<double> coarse_x = {-2.0, -1.0, 0.0, 1.0, 2.0};
    auto c5 = condition5_grid(sc, coarse_x, config.validate.n_condition, config.seed + 202);
    auto c6 = completeness_spectrum(A);
    rep["condition3"] = report_condition(c3);
    rep["condition5"] = report_condition(c5);
    rep["condition6"] = report_condition(c6);

    double z_rate = km.z_levels.empty() ? sc.baseline_z : km.z_levels.back();
    auto r10 = rate_check_sigma(sc, z_rate, config.validate.sigma_ladder,
                                config.validate.n_rate, config.seed + 303);
    auto r11 = rate_check_phi(sc, 0.0, z_rate, config.validate.sigma_ladder,
                              config.validate.n_rate, config.seed + 404);
    rep["rate_sigma"] = report_rate(r10);
    rep["rate_phi"] = report_rate(r11);

    bool pass = fwd_pass && c3.pass && c5.pass && c6.pass && r10.pass && r11.pass;
    rep["pass"] = pass;
    write_json(config.out / "report.json", rep);
    note(quiet, std::string("validation ") + (pass ? "PASS" : "FAIL") + "; wrote " +
                    (config.out / "report.json").string());
    return pass;
}

void cmd_report(const RunConfig& config, const std::filesystem::path& run_dir, bool quiet) {
    auto [xs, theta] = read_theta_csv(run_dir / "theta.csv");

    std::ofstream plot(run_dir / "plotdata.csv", std::ios::binary);
    if (!plot) throw DataError("cannot write " + (run_dir / "plotdata.csv").string());
    plot << "x,theta_hat,theta_true\n";
    for (std::size_t j = 0; j < xs.size(); ++j)
        plot << format_double(xs[j]) << ','
             << format_double(theta[static_cast<Eigen::Index>(j)]) << ','
             << format_double(true_theta(config.scenario, xs[j])) << '\n';

    std::ofstream summary(run_dir / "summary.txt", std::ios::binary);
    summary << "run summary\n";
    summary << "  scenario: " << config.scenario.id << "\n";
    summary << "  seed: " << config.seed << "\n";
    summary << "  config_hash: " << config.config_hash << "\n";
    summary << "  grid points: " << xs.size() << "\n";
    if (std::filesystem::exists(run_dir / "solution.json")) {
        json sol = read_json(run_dir / "solution.json");
        summary << "  lambda: " << sol.value("lambda", 0.0) << "\n";
        summary << "  penalty: " << sol.value("penalty_kind", std::string("?")) << "\n";
        summary << "  residual_norm: " << sol.value("residual_norm", 0.0) << "\n";
    }
    note(quiet, "wrote " + (run_dir / "plotdata.csv").string() + ", " +
                    (run_dir / "summary.txt").string());
}

} // namespace ivtheta
