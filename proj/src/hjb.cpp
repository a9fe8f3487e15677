#include "mfg/hjb.hpp"

#include "mfg/error.hpp"
#include "mfg/tridiag.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

void HjbConfig::validate(const Grid& grid) const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::parameter, "sigma must be positive");
    if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorKind::parameter, "discount rate must be >= 0");
    check_profile(grid, terminal, "terminal profile");
    if (terminal.front() != 0.0) throw Error(ErrorKind::parameter, "terminal profile must vanish at x = 0");
    for (double v : terminal) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::parameter, "terminal profile must be finite and >= 0");
        }
    }
}

double terminal_c0(const Grid& grid, std::span<const double> terminal) {
    const Profile g = backward_gradient(grid, terminal);
    return -std::min(*std::min_element(g.begin(), g.end()), 0.0);
}

double check_compatibility(const Grid& grid, const HjbConfig& cfg, const JumpOperator& L,
                           const DemandModel& model) {
    const auto& u = cfg.terminal;
    check_profile(grid, u, "terminal profile");
    const double s2 = cfg.sigma * cfg.sigma + L.small_jump_variance;
    const double ux = (u[1] - u[0]) / grid.dx;
    const double uxx = (u[2] - 2.0 * u[1] + u[0]) / (grid.dx * grid.dx);
    const double h = hamiltonian(model, grid.horizon, ux, 0.0, 1.0);
    double jump = 0.0;
    if (!L.empty()) jump = L.apply(u)[0];
    return std::fabs(0.5 * s2 * uxx - cfg.r * u[0] + h + jump);
}

namespace {

struct Tridiagonal {
    std::vector<double> lower, diag, upper;
};

// (1/dt + r - 1/2 s^2 Delta_h) on nodes 1..nx+1 with u_0 = 0 and a constant ghost
Tridiagonal assemble(const Grid& grid, double s2, double r) {
    const std::size_t k = grid.last();
    const double a = 0.5 * s2 / (grid.dx * grid.dx);
    Tridiagonal m{std::vector<double>(k, -a), std::vector<double>(k, 1.0 / grid.dt + r + 2.0 * a),
                  std::vector<double>(k, -a)};
    m.diag[k - 1] = 1.0 / grid.dt + r + a;
    return m;
}

Profile explicit_rhs(const Grid& grid, std::span<const double> u_next, std::span<const double> source,
                     std::span<const double> jump) {
    Profile rhs(grid.nodes(), 0.0);
    for (std::size_t i = 1; i < rhs.size(); ++i) rhs[i] = u_next[i] / grid.dt + source[i] + jump[i];
    return rhs;
}

Profile solve_level(const Grid& grid, std::span<const double> u_next, std::span<const double> source,
                    std::span<const double> jump, double s2, double r) {
    const std::size_t k = grid.last();
    const Tridiagonal m = assemble(grid, s2, r);
    const Profile full = explicit_rhs(grid, u_next, source, jump);
    std::vector<double> x(k);
    solve_tridiagonal(m.lower, m.diag, m.upper, std::span<const double>(full).subspan(1, k), x);
    Profile u(grid.nodes(), 0.0);
    std::copy(x.begin(), x.end(), u.begin() + 1);
    return u;
}

} // namespace

HjbStep hjb_step(const Grid& grid, std::span<const double> u_next, std::size_t n,
                 std::span<const double> m_n, const JumpOperator& L, const HjbConfig& cfg,
                 const DemandModel& model, double lambda) {
    check_profile(grid, u_next, "u_next");
    check_profile(grid, m_n, "m_n");
    const double t = grid.t(n);
    const double s2 = cfg.sigma * cfg.sigma + L.small_jump_variance;
    const std::size_t nodes = grid.nodes();

    HjbStep out;
    out.eta = integrate(grid, m_n);
    const Profile phi = backward_gradient(grid, u_next);
    out.clearing = clear_market(model, grid, t, phi, m_n);
    out.aggregate = out.clearing.value;

    const Profile jump = L.empty() ? Profile(nodes, 0.0) : L.apply(u_next);
    Profile source(nodes, 0.0);
    out.hamiltonian.assign(nodes, 0.0);
    out.drift.assign(nodes, 0.0);
    auto fill = [&]() {
        for (std::size_t i = 0; i < nodes; ++i) {
            const HamiltonianValue hv = evaluate(model, t, phi[i], out.aggregate, out.eta);
            out.hamiltonian[i] = hv.h;
            out.drift[i] = -lambda * hv.dh;
            source[i] = lambda * hv.h;
        }
    };
    fill();
    out.u = solve_level(grid, u_next, source, jump, s2, cfg.r);

    if (cfg.inner_loop && model.aggregate() != Aggregate::none) {
        for (int it = 0; it < 50; ++it) {
            const Profile fresh = backward_gradient(grid, out.u);
            const ClearingResult c = clear_market(model, grid, t, fresh, m_n);
            const double moved = std::fabs(c.value - out.aggregate);
            out.clearing = c;
            out.aggregate = c.value;
            fill();
            out.u = solve_level(grid, u_next, source, jump, s2, cfg.r);
            if (moved < 1e-8) break;
        }
    }
    return out;
}

Profile hjb_residual(const Grid& grid, std::span<const double> u_n, std::span<const double> u_next,
                     std::size_t n, std::span<const double> m_n, const JumpOperator& L,
                     const HjbConfig& cfg, const DemandModel& model, double lambda) {
    check_profile(grid, u_n, "u_n");
    HjbConfig plain = cfg;
    plain.inner_loop = false;
    const HjbStep step = hjb_step(grid, u_next, n, m_n, L, plain, model, lambda);
    const double s2 = cfg.sigma * cfg.sigma + L.small_jump_variance;
    const Tridiagonal m = assemble(grid, s2, cfg.r);
    Profile source(grid.nodes());
    for (std::size_t i = 0; i < source.size(); ++i) source[i] = lambda * step.hamiltonian[i];
    const Profile jump = L.empty() ? Profile(grid.nodes(), 0.0) : L.apply(u_next);
    const Profile rhs = explicit_rhs(grid, u_next, source, jump);
    Profile res(grid.nodes(), 0.0);
    const std::size_t k = grid.last();
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t i = j + 1;
        double v = m.diag[j] * u_n[i] - rhs[i];
        if (j > 0) v += m.lower[j] * u_n[i - 1];
        if (j + 1 < k) v += m.upper[j] * u_n[i + 1];
        res[i] = v;
    }
    return res;
}

HjbSolution hjb_solve(const Grid& grid, const HjbConfig& cfg, const JumpOperator& L,
                      const DemandModel& model, const Field& m, double lambda) {
    if (m.levels() != grid.nt + 1 || m.cols() != grid.nodes()) {
        throw Error(ErrorKind::dimension, "density field does not match the grid");
    }
    HjbSolution sol;
    sol.u = Field(grid, Unit::currency, true);
    sol.drift = Field(grid, Unit::dimensionless, false);
    sol.hamiltonian = Field(grid, Unit::currency, false);
    sol.aggregate.assign(grid.nt + 1, 0.0);
    sol.eta.assign(grid.nt + 1, 0.0);

    Profile terminal(cfg.terminal);
    for (double& v : terminal) v *= lambda;
    sol.u.set_row(grid.nt, terminal);

    {
        // terminal level: aggregate and drift from u_T itself
        const std::span<const double> mt = m.row(grid.nt);
        const Profile phi = backward_gradient(grid, terminal);
        const double t = grid.horizon;
        const double eta = integrate(grid, mt);
        const ClearingResult c = clear_market(model, grid, t, phi, mt);
        sol.aggregate[grid.nt] = c.value;
        sol.eta[grid.nt] = eta;
        sol.clearing_bounds_ok = c.bound_check;
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            const HamiltonianValue hv = evaluate(model, t, phi[i], c.value, eta);
            sol.drift.at(grid.nt, i) = -lambda * hv.dh;
            sol.hamiltonian.at(grid.nt, i) = hv.h;
        }
    }

    for (std::size_t n = grid.nt; n-- > 0;) {
        HjbStep step = hjb_step(grid, sol.u.row(n + 1), n, m.row(n), L, cfg, model, lambda);
        sol.u.set_row(n, step.u);
        sol.drift.set_row(n, step.drift);
        sol.hamiltonian.set_row(n, step.hamiltonian);
        sol.aggregate[n] = step.aggregate;
        sol.eta[n] = step.eta;
        sol.clearing_bounds_ok = sol.clearing_bounds_ok && step.clearing.bound_check;
        sol.clearing_iterations += step.clearing.iterations;
    }
    return sol;
}

} // namespace mfg
