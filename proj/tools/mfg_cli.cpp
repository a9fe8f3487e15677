// mfg: solve, simulate, verify and sweep the producer mean field game.

#include "mfg/commands.hpp"
#include "mfg/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
    CLI::App app{"Mean field game solver for exhaustible-resource Bertrand and Cournot markets"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string policy;
    std::string solution;
    std::string param;
    std::vector<std::string> values;
    std::uint64_t seed = 0;

    auto* solve = app.add_subcommand("solve", "compute an equilibrium and run the bound checks");
    solve->add_option("--config", config, "run configuration")->required()->check(CLI::ExistingFile);
    solve->add_option("--out", out, "output directory (default: run.out)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo cross-check of a stored solve");
    simulate->add_option("--config", config, "run configuration")->required()->check(CLI::ExistingFile);
    simulate->add_option("--policy", policy, "directory written by solve")->required()->check(CLI::ExistingDirectory);
    simulate->add_option("--out", out, "output directory (default: the policy directory)");
    auto* seed_opt = simulate->add_option("--seed", seed, "override particle.seed");

    auto* verify = app.add_subcommand("verify", "re-run the bound checks on stored CSVs");
    verify->add_option("--solution", solution, "directory written by solve")->required()->check(CLI::ExistingDirectory);
    verify->add_option("--config", config, "configuration (default: <solution>/config.cfg)");

    auto* sweep = app.add_subcommand("sweep", "solve once per parameter value, concurrently");
    sweep->add_option("--config", config, "base configuration")->required()->check(CLI::ExistingFile);
    sweep->add_option("--param", param, "config key, or its last component (eps0)")->required();
    sweep->add_option("--values", values, "comma separated values")->required()->delimiter(',');
    sweep->add_option("--out", out, "directory for sweep.csv");

    CLI11_PARSE(app, argc, argv);

    auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
        if (s.empty()) return std::nullopt;
        return std::filesystem::path(s);
    };

    try {
        if (*solve) return mfg::cmd_solve(config, opt_path(out), std::cout);
        if (*simulate) {
            std::optional<std::uint64_t> s;
            if (seed_opt->count() > 0) s = seed;
            return mfg::cmd_simulate(config, policy, opt_path(out), s, std::cout);
        }
        if (*verify) return mfg::cmd_verify(solution, opt_path(config), std::cout);
        if (*sweep) return mfg::cmd_sweep(config, param, values, opt_path(out), std::cout);
    } catch (const mfg::Error& e) {
        std::cerr << e.what() << '\n';
        return e.kind() == mfg::ErrorKind::config ? mfg::exit_bad_config : 4;
    }
    return 0;
}
