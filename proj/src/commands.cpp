#include "mfg/commands.hpp"

#include "mfg/error.hpp"
#include "mfg/io.hpp"
#include "mfg/particle.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>

namespace mfg {

namespace {

Field price_field(const Problem& p, const Field& u, const std::vector<double>& agg, const std::vector<double>& eta) {
    const Grid& g = p.grid;
    Field out(g, Unit::currency, false);
    for (std::size_t n = 0; n <= g.nt; ++n) {
        const Profile phi = backward_gradient(g, u.row(std::min(n + 1, g.nt)));
        for (std::size_t i = 0; i < g.nodes(); ++i) {
            const double price = optimal_action(p.model, g.t(n), phi[i], agg[n], eta[n]).price;
            out.at(n, i) = std::isfinite(price) ? price : 0.0;
        }
    }
    return out;
}

double numeric_or_nan(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        return NAN;
    }
}

} // namespace

SolveOutcome run_solve(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    SolveOutcome res;
    res.config = cfg;
    const Problem& problem = cfg.problem;
    if (cfg.compat_residual > problem.hjb.compat_tol) {
        log << "warning: terminal data compatibility residual " << cfg.compat_residual << " exceeds "
            << problem.hjb.compat_tol << " (corner regularity only)\n";
    }
    std::vector<std::vector<double>> iter_rows;
    res.solution = solve_mfg(problem, cfg.coupler, [&](const IterationLog& e) {
        iter_rows.push_back({static_cast<double>(e.iteration), e.lambda, e.residual, e.change});
    });
    const EquilibriumSolution& sol = res.solution;
    const double lambda = sol.lambda;
    res.report = run_checks(problem, sol.u, sol.m, sol.aggregate, lambda, cfg.verify_C);

    const Grid& g = problem.grid;
    write_field_csv(out / "u.csv", sol.u);
    write_field_csv(out / "m.csv", sol.m);
    write_field_csv(out / "q.csv", sol.drift);
    write_field_csv(out / "price.csv", price_field(problem, sol.u, sol.aggregate, sol.eta));
    Traces tr;
    for (std::size_t n = 0; n <= g.nt; ++n) tr.t.push_back(g.t(n));
    tr.eta = sol.eta;
    tr.aggregate = sol.aggregate;
    tr.pbar = sol.pbar;
    write_traces_csv(out / "traces.csv", tr);
    write_table_csv(out / "iterations.csv", {"iteration", "lambda", "residual", "change"}, iter_rows);
    std::vector<std::vector<double>> prof;
    for (std::size_t i = 0; i < g.nodes(); ++i) {
        prof.push_back({g.x(i), sol.u.at(0, i), sol.u.at(g.nt, i), sol.m.at(0, i), sol.m.at(g.nt, i)});
    }
    write_table_csv(out / "profiles.csv", {"x", "u_0", "u_T", "m_0", "m_T"}, prof);
    write_text(out / "report.txt", report_text(res.report));
    write_text(out / "report.csv", report_csv(res.report));
    write_text(out / "config.cfg", cfg.document.text());
    write_text(out / "plot.gp", gnuplot_script(cfg.label));

    log << cfg.label << ": " << (sol.converged ? "converged" : "NOT converged") << " after " << sol.iterations
        << " outer iterations";
    if (!sol.history.empty()) log << " (last change " << sol.history.back() << ")";
    log << '\n' << report_text(res.report);

    if (!sol.converged) res.exit_code = exit_not_converged;
    else if (!res.report.all_passed()) res.exit_code = exit_checks_failed;
    return res;
}

VerificationReport verify_directory(const std::filesystem::path& dir, const RunConfig& cfg) {
    const Grid& g = cfg.problem.grid;
    const Field u = read_field_csv(dir / "u.csv", g, Unit::currency, true);
    const Field m = read_field_csv(dir / "m.csv", g, Unit::density, true);
    const Traces tr = read_traces_csv(dir / "traces.csv");
    const double lambda = cfg.coupler.lambda_ladder.back();
    return run_checks(cfg.problem, u, m, tr.aggregate, lambda, cfg.verify_C);
}

int cmd_solve(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out,
              std::ostream& log) {
    RunConfig cfg;
    try {
        cfg = load_run_config(config);
    } catch (const Error& e) {
        log << e.what() << '\n';
        return exit_bad_config;
    }
    return run_solve(cfg, out.value_or(cfg.out), log).exit_code;
}

int cmd_verify(const std::filesystem::path& solution, const std::optional<std::filesystem::path>& config,
               std::ostream& log) {
    RunConfig cfg;
    try {
        cfg = load_run_config(config.value_or(solution / "config.cfg"));
    } catch (const Error& e) {
        log << e.what() << '\n';
        return exit_bad_config;
    }
    const VerificationReport rep = verify_directory(solution, cfg);
    log << report_text(rep);
    const auto stored = solution / "report.csv";
    if (std::filesystem::exists(stored)) {
        const bool same = read_text(stored) == report_csv(rep);
        log << (same ? "matches stored report.csv\n" : "DIFFERS from stored report.csv\n");
    }
    return rep.all_passed() ? exit_ok : exit_checks_failed;
}

int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& policy,
                 const std::optional<std::filesystem::path>& out, std::optional<std::uint64_t> seed,
                 std::ostream& log) {
    RunConfig cfg;
    try {
        cfg = load_run_config(config);
    } catch (const Error& e) {
        log << e.what() << '\n';
        return exit_bad_config;
    }
    if (seed) cfg.particle.seed = *seed;
    const Problem& p = cfg.problem;
    const Grid& g = p.grid;
    const Field u = read_field_csv(policy / "u.csv", g, Unit::currency, true);
    const Field m = read_field_csv(policy / "m.csv", g, Unit::density, true);
    const Traces tr = read_traces_csv(policy / "traces.csv");
    const double lambda = cfg.coupler.lambda_ladder.back();
    const PolicyFields pol = derive_policy(p, u, tr.aggregate, tr.eta, lambda);

    SimulationInput in;
    in.grid = g;
    in.sigma = p.hjb.sigma;
    in.r = p.hjb.r;
    in.policy = &pol.production;
    in.revenue = &pol.revenue;
    in.terminal.assign(u.row(g.nt).begin(), u.row(g.nt).end());
    in.m0 = p.fp.m0;
    in.jumps = &p.jumps;

    ParticleConfig pc = cfg.particle;
    pc.start = StartMode::density;
    const SimulationResult dens = simulate(in, pc);
    std::vector<std::vector<double>> hist_rows;
    double worst_l1 = 0.0;
    for (std::size_t n = 0; n <= g.nt; ++n) {
        std::vector<double> row{g.t(n), dens.eta_hat[n], histogram_l1(g, dens, m.row(n), n)};
        worst_l1 = std::max(worst_l1, row.back());
        const auto h = dens.density(n);
        row.insert(row.end(), h.begin(), h.end());
        hist_rows.push_back(std::move(row));
    }
    std::vector<std::string> header{"t", "eta_hat", "l1_vs_pde"};
    for (std::size_t i = 0; i < g.nodes(); ++i) header.push_back(format_number(g.x(i)));
    const auto dir = out.value_or(policy);
    write_table_csv(dir / "histograms.csv", header, hist_rows);

    pc.start = StartMode::uniform;
    pc.seed = pc.seed + 1;
    const SimulationResult unif = simulate(in, pc);
    const auto scores = value_check(g, u, unif, 12);
    std::vector<std::vector<double>> z_rows;
    bool ok = true;
    for (const BinScore& s : scores) {
        z_rows.push_back({s.x_lo, s.x_hi, static_cast<double>(s.count), s.mc_mean, s.mc_stderr, s.pde_mean, s.z,
                          s.flagged ? 1.0 : 0.0});
        if (!s.flagged && std::fabs(s.z) > 3.0) ok = false;
    }
    write_table_csv(dir / "zscores.csv", {"x_lo", "x_hi", "count", "mc_mean", "mc_stderr", "pde_mean", "z", "flagged"},
                    z_rows);
    log << "particles: " << pc.n << ", max L1(histogram, m) = " << worst_l1 << ", value z-scores "
        << (ok ? "within 3" : "OUTSIDE 3") << '\n';
    return ok ? exit_ok : exit_checks_failed;
}

int cmd_sweep(const std::filesystem::path& config, const std::string& param, const std::vector<std::string>& values,
              const std::optional<std::filesystem::path>& out, std::ostream& log) {
    ConfigDocument base;
    std::string key;
    std::vector<RunConfig> runs;
    try {
        base = ConfigDocument::load(config);
        key = resolve_key(param);
        for (const std::string& v : values) {
            ConfigDocument doc = base;
            doc.set(key, v);
            runs.push_back(build_run_config(doc));
        }
    } catch (const Error& e) {
        log << e.what() << '\n';
        return exit_bad_config;
    }
    std::vector<std::vector<double>> rows(runs.size());
    std::vector<std::string> errors(runs.size());
    std::size_t next = 0;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            std::size_t k;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= runs.size()) return;
                k = next++;
            }
            try {
                const EquilibriumSolution sol = solve_mfg(runs[k].problem, runs[k].coupler);
                const VerificationReport rep =
                    run_checks(runs[k].problem, sol.u, sol.m, sol.aggregate, sol.lambda, runs[k].verify_C);
                std::size_t passed = 0;
                for (const Check& c : rep.checks) passed += c.passed ? 1 : 0;
                rows[k] = {numeric_or_nan(values[k]), sol.converged ? 1.0 : 0.0, static_cast<double>(sol.iterations),
                           sol.history.empty() ? 0.0 : sol.history.back(), static_cast<double>(passed),
                           static_cast<double>(rep.checks.size())};
            } catch (const std::exception& e) {
                errors[k] = e.what();
                rows[k] = {numeric_or_nan(values[k]), 0.0, 0.0, NAN, 0.0, 0.0};
            }
        }
    };
    const std::size_t workers = std::min(thread_budget(0), runs.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    const auto dir = out.value_or(std::filesystem::path(base.get("run.out", "out/sweep")));
    write_table_csv(dir / "sweep.csv", {key, "converged", "iterations", "final_change", "checks_passed", "checks_total"},
                    rows);
    bool all = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        log << key << " = " << values[k] << ": ";
        if (!errors[k].empty()) {
            log << "error: " << errors[k] << '\n';
            all = false;
            continue;
        }
        log << (rows[k][1] == 1.0 ? "converged" : "not converged") << ", checks " << rows[k][4] << "/" << rows[k][5]
            << '\n';
        all = all && rows[k][1] == 1.0 && rows[k][4] == rows[k][5];
    }
    return all ? exit_ok : exit_checks_failed;
}

} // namespace mfg
