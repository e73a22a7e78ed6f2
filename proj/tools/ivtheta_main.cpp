#include "ivtheta/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace ivtheta;

int main(int argc, char** argv) {
    CLI::App app{"ivtheta: instrumental-variable causal effect estimation via a "
                 "first-kind integral equation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    bool quiet = false;

    app.add_option("--config", config_path, "run configuration JSON")->required();
    app.add_option("--out", out_override, "override output directory");
    app.add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_flag("--quiet", quiet, "suppress progress output");

    auto* sim = app.add_subcommand("simulate", "draw samples.csv from the scenario");
    std::string samples_path;
    auto* est = app.add_subcommand("estimate", "build kernel.csv and rhs.csv");
    est->add_option("--samples", samples_path, "samples CSV (default: <out>/samples.csv)");
    std::string kernel_path, rhs_path;
    auto* sol = app.add_subcommand("solve", "solve for theta.csv + solution.json");
    sol->add_option("--kernel", kernel_path, "kernel CSV (default: <out>/kernel.csv)");
    sol->add_option("--rhs", rhs_path, "rhs CSV (default: <out>/rhs.csv)");
    auto* val = app.add_subcommand("validate", "run consistency, condition and rate checks");
    std::string run_dir;
    auto* repc = app.add_subcommand("report", "write plotdata.csv and summary.txt");
    repc->add_option("--run-dir", run_dir, "run directory (default: <out>)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        RunConfig config = load_config(
            config_path, seed_given ? std::optional<std::uint64_t>(seed_override) : std::nullopt,
            out_override.empty() ? std::nullopt
                                 : std::optional<std::filesystem::path>(out_override));
        if (sim->parsed()) {
            cmd_simulate(config, quiet);
        } else if (est->parsed()) {
            cmd_estimate(config,
                         samples_path.empty()
                             ? std::nullopt
                             : std::optional<std::filesystem::path>(samples_path),
                         quiet);
        } else if (sol->parsed()) {
            cmd_solve(config,
                      kernel_path.empty() ? std::nullopt
                                          : std::optional<std::filesystem::path>(kernel_path),
                      rhs_path.empty() ? std::nullopt
                                       : std::optional<std::filesystem::path>(rhs_path),
                      quiet);
        } else if (val->parsed()) {
            return cmd_validate(config, quiet) ? 0 : 3;
        } else if (repc->parsed()) {
            cmd_report(config, run_dir.empty() ? config.out : std::filesystem::path(run_dir),
                       quiet);
        }
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}
