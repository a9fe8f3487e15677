#include "mfg/coupler.hpp"

#include "mfg/error.hpp"
#include "mfg/kernels.hpp"
#include "mfg/market.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

void CouplerConfig::validate() const {
    if (!(damping > 0.0 && damping <= 1.0)) throw Error(ErrorKind::parameter, "damping must lie in (0, 1]");
    if (!(tol > 0.0)) throw Error(ErrorKind::parameter, "outer tolerance must be positive");
    if (max_iter == 0) throw Error(ErrorKind::parameter, "max_iter must be positive");
    if (lambda_ladder.empty()) throw Error(ErrorKind::parameter, "lambda ladder is empty");
    if (lambda_ladder.size() == 1 && lambda_ladder[0] == 0.0) return;  // degenerate system
    for (std::size_t j = 0; j < lambda_ladder.size(); ++j) {
        const double l = lambda_ladder[j];
        if (!(l > 0.0 && l <= 1.0)) throw Error(ErrorKind::parameter, "lambda values must lie in (0, 1]");
        if (j > 0 && !(l > lambda_ladder[j - 1])) {
            throw Error(ErrorKind::parameter, "lambda ladder must be increasing");
        }
    }
    if (lambda_ladder.back() != 1.0) throw Error(ErrorKind::parameter, "lambda ladder must end at 1");
}

Scheme parse_scheme(const std::string& s) {
    if (s == "picard") return Scheme::picard;
    if (s == "fictitious_play") return Scheme::fictitious_play;
    throw Error(ErrorKind::parameter, "unknown scheme '" + s + "'");
}

InitMode parse_init(const std::string& s) {
    if (s == "propagated") return InitMode::propagated;
    if (s == "uniform") return InitMode::uniform;
    throw Error(ErrorKind::parameter, "unknown init mode '" + s + "'");
}

Field initial_guess(const Problem& problem, InitMode mode, double lambda) {
    const Grid& grid = problem.grid;
    if (mode == InitMode::propagated) {
        const Field zero(grid, Unit::dimensionless, false);
        return fp_solve(grid, problem.fp, problem.jumps, zero, lambda).m;
    }
    Field m(grid, Unit::density, true);
    Profile row(grid.nodes(), lambda / grid.x_max);
    row.front() = 0.0;
    row.back() = 0.0;
    for (std::size_t n = 0; n <= grid.nt; ++n) m.set_row(n, row);
    return m;
}

namespace {

double sup_change(const Field& a, const Field& b) { return kernels::max_abs_diff(a.data(), b.data()); }

void blend(Field& m, const Field& target, double theta) {
    Field next(m.grid(), Unit::density, true);
    for (std::size_t n = 0; n < m.levels(); ++n) {
        Profile row(m.cols());
        kernels::axpby(1.0 - theta, m.row(n), theta, target.row(n), row);
        next.set_row(n, row);
    }
    m = std::move(next);
}

EquilibriumSolution zero_solution(const Problem& problem) {
    const Grid& g = problem.grid;
    EquilibriumSolution s;
    s.u = Field(g, Unit::currency, true);
    s.m = Field(g, Unit::density, true);
    s.drift = Field(g, Unit::dimensionless, false);
    s.hamiltonian = Field(g, Unit::currency, false);
    s.eta.assign(g.nt + 1, 0.0);
    s.aggregate.assign(g.nt + 1, 0.0);
    s.pbar.assign(g.nt + 1, 0.0);
    s.left_flux.assign(g.nt, 0.0);
    s.right_flux.assign(g.nt, 0.0);
    s.jump_flux.assign(g.nt, 0.0);
    s.lambda_path = {0.0};
    s.lambda = 0.0;
    s.converged = true;
    return s;
}

} // namespace

EquilibriumSolution solve_mfg(const Problem& problem, const CouplerConfig& cfg,
                              const IterationCallback& on_iteration) {
    cfg.validate();
    const Grid& grid = problem.grid;
    problem.hjb.validate(grid);
    problem.fp.validate(grid);
    problem.model.validate();
    check_jump_cfl(grid, problem.jumps);

    if (cfg.lambda_ladder.back() == 0.0) return zero_solution(problem);

    EquilibriumSolution sol;
    Field m = initial_guess(problem, cfg.init, cfg.lambda_ladder.front());
    double prev_lambda = cfg.lambda_ladder.front();

    for (double lambda : cfg.lambda_ladder) {
        if (lambda != prev_lambda) {
            // warm start: rescale the previous stage's density to the new mass
            const double s = lambda / prev_lambda;
            Field scaled(grid, Unit::density, true);
            for (std::size_t n = 0; n <= grid.nt; ++n) {
                Profile row(m.row(n).begin(), m.row(n).end());
                for (double& v : row) v *= s;
                scaled.set_row(n, row);
            }
            m = std::move(scaled);
        }
        prev_lambda = lambda;
        sol.lambda_path.push_back(lambda);
        sol.lambda = lambda;
        sol.converged = false;

        for (std::size_t k = 0; k < cfg.max_iter; ++k) {
            HjbSolution hs = hjb_solve(grid, problem.hjb, problem.jumps, problem.model, m, lambda);
            FpSolution fs = fp_solve(grid, problem.fp, problem.jumps, hs.drift, lambda);
            IterationLog entry;
            entry.iteration = ++sol.iterations;
            entry.lambda = lambda;
            entry.residual = sup_change(fs.m, m);

            const bool done = entry.residual <= cfg.tol;
            if (done) {
                entry.change = 0.0;
            } else {
                const double theta = cfg.scheme == Scheme::picard ? cfg.damping
                                                                   : 1.0 / static_cast<double>(k + 2);
                const Field before = m;
                blend(m, fs.m, theta);
                entry.change = sup_change(m, before);
            }
            sol.history.push_back(done ? entry.residual : entry.change);
            sol.log.push_back(entry);
            if (on_iteration) on_iteration(entry);

            sol.u = std::move(hs.u);
            sol.drift = std::move(hs.drift);
            sol.hamiltonian = std::move(hs.hamiltonian);
            sol.aggregate = std::move(hs.aggregate);
            sol.clearing_bounds_ok = hs.clearing_bounds_ok;
            sol.m = std::move(fs.m);
            sol.eta = std::move(fs.eta);
            sol.left_flux = std::move(fs.left_flux);
            sol.right_flux = std::move(fs.right_flux);
            sol.jump_flux = std::move(fs.jump_flux);
            if (done) {
                sol.converged = true;
                break;
            }
        }
        if (!sol.converged) break;
    }

    if (sol.converged && sol.lambda > 0.0 && problem.model.aggregate() != Aggregate::none) {
        // re-clear against the returned density so the trace matches (u, m)
        for (std::size_t n = 0; n <= grid.nt; ++n) {
            const Profile phi = backward_gradient(grid, sol.u.row(n < grid.nt ? n + 1 : grid.nt));
            const ClearingResult c = clear_market(problem.model, grid, grid.t(n), phi, sol.m.row(n));
            sol.aggregate[n] = c.value;
            sol.clearing_bounds_ok = sol.clearing_bounds_ok && c.bound_check;
        }
    }
    sol.pbar.assign(sol.eta.size(), 0.0);
    for (std::size_t n = 0; n < sol.eta.size(); ++n) {
        if (sol.eta[n] > 0.0) sol.pbar[n] = sol.aggregate[n] / sol.eta[n];
    }
    return sol;
}

ResidualNorms residual(const Problem& problem, const Field& u, const Field& m, double lambda) {
    const Grid& grid = problem.grid;
    if (u.levels() != grid.nt + 1 || m.levels() != grid.nt + 1) {
        throw Error(ErrorKind::dimension, "fields do not match the grid");
    }
    ResidualNorms out;
    if (lambda == 0.0) {
        out.hjb_sup = std::max(std::fabs(u.max()), std::fabs(u.min()));
        out.fp_sup = std::max(std::fabs(m.max()), std::fabs(m.min()));
        out.hjb_l2 = out.hjb_sup;
        out.fp_l2 = out.fp_sup;
        return out;
    }
    double hjb_sq = 0.0;
    double fp_sq = 0.0;
    for (std::size_t n = 0; n < grid.nt; ++n) {
        const Profile rh = hjb_residual(grid, u.row(n), u.row(n + 1), n, m.row(n), problem.jumps,
                                        problem.hjb, problem.model, lambda);
        const HjbStep step = hjb_step(grid, u.row(n + 1), n, m.row(n), problem.jumps, problem.hjb,
                                      problem.model, lambda);
        const Profile rf = fp_residual(grid, m.row(n + 1), m.row(n), step.drift, problem.jumps, problem.fp);
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            out.hjb_sup = std::max(out.hjb_sup, std::fabs(rh[i]));
            out.fp_sup = std::max(out.fp_sup, std::fabs(rf[i]));
            hjb_sq += rh[i] * rh[i];
            fp_sq += rf[i] * rf[i];
        }
    }
    const double w = grid.dx * grid.dt;
    out.hjb_l2 = std::sqrt(w * hjb_sq);
    out.fp_l2 = std::sqrt(w * fp_sq);
    return out;
}

PolicyFields derive_policy(const Problem& problem, const Field& u, const std::vector<double>& aggregate,
                           const std::vector<double>& eta, double lambda) {
    const Grid& grid = problem.grid;
    if (aggregate.size() != grid.nt + 1 || eta.size() != grid.nt + 1) {
        throw Error(ErrorKind::dimension, "trace length does not match the grid");
    }
    PolicyFields out{Field(grid, Unit::dimensionless, false), Field(grid, Unit::currency, false)};
    for (std::size_t n = 0; n <= grid.nt; ++n) {
        const Profile phi = backward_gradient(grid, u.row(std::min(n + 1, grid.nt)));
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            const double t = grid.t(n);
            out.production.at(n, i) = -lambda * dH_dxi(problem.model, t, phi[i], aggregate[n], eta[n]);
            out.revenue.at(n, i) = lambda * optimal_action(problem.model, t, phi[i], aggregate[n], eta[n]).revenue;
        }
    }
    return out;
}

} // namespace mfg
