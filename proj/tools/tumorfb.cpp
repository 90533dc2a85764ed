// Command-line entry point: tumorfb <stationary|bifurcation|simulate|verify> --config FILE [options]

#include "tumorfb/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv)
{
    CLI::App app{"Radially symmetric free-boundary tumor growth: stationary analysis, simulation and verification"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<unsigned> parallel;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.add_option("--parallel", parallel, "Worker threads for independent runs (default 1)")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("--seed", seed, "Seed for randomized scenarios");

    auto* stationary = app.add_subcommand("stationary", "Stationary radii, r_# and theta_*");
    auto* bifurcation = app.add_subcommand("bifurcation", "Scan the landscape over gamma or sigma_tilde");
    auto* simulate = app.add_subcommand("simulate", "Integrate the quasi-stationary (c = 0) or full problem");
    auto* verify = app.add_subcommand("verify", "Run the verification suite; exit 1 if any check fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        auto cfg = tumorfb::load_config(config_path);
        if (out_dir) cfg.output = *out_dir;
        if (parallel) cfg.parallel = *parallel;
        if (seed) cfg.seed = *seed;

        if (stationary->parsed()) return tumorfb::cmd_stationary(cfg, std::cout);
        if (bifurcation->parsed()) return tumorfb::cmd_bifurcation(cfg, std::cout);
        if (simulate->parsed()) return tumorfb::cmd_simulate(cfg, std::cout);
        if (verify->parsed()) return tumorfb::cmd_verify(cfg, std::cout);
    } catch (const tumorfb::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
