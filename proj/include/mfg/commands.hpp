#pragma once

#include "mfg/config.hpp"
#include "mfg/verify.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mfg {

/// Exit codes shared by the subcommands.
enum ExitCode : int {
    exit_ok = 0,
    exit_bad_config = 1,
    exit_checks_failed = 2,
    exit_not_converged = 3,
};

struct SolveOutcome {
    RunConfig config;
    EquilibriumSolution solution;
    VerificationReport report;
    int exit_code = exit_ok;
};

/// Solves, verifies and writes u.csv, m.csv, q.csv, price.csv, traces.csv,
/// iterations.csv, profiles.csv, report.txt, report.csv, config.cfg and plot.gp
/// into `out`.
SolveOutcome run_solve(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// Re-runs the checks on a stored solve directory.
VerificationReport verify_directory(const std::filesystem::path& dir, const RunConfig& cfg);

int cmd_solve(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out,
              std::ostream& log);
int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& policy,
                 const std::optional<std::filesystem::path>& out, std::optional<std::uint64_t> seed,
                 std::ostream& log);
int cmd_verify(const std::filesystem::path& solution, const std::optional<std::filesystem::path>& config,
               std::ostream& log);
int cmd_sweep(const std::filesystem::path& config, const std::string& param, const std::vector<std::string>& values,
              const std::optional<std::filesystem::path>& out, std::ostream& log);

} // namespace mfg
