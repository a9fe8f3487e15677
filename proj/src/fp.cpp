#include "mfg/fp.hpp"

#include "mfg/error.hpp"
#include "mfg/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfg {

void FpConfig::validate(const Grid& grid) const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::parameter, "sigma must be positive");
    check_profile(grid, m0, "initial density");
    for (std::size_t i = 0; i < m0.size(); ++i) {
        if (!(m0[i] >= 0.0) || !std::isfinite(m0[i])) {
            std::ostringstream os;
            os << "initial density must be finite and >= 0 (node " << i << " holds " << m0[i] << ")";
            throw Error(ErrorKind::parameter, os.str());
        }
    }
    if (m0.front() != 0.0 || m0.back() != 0.0) {
        throw Error(ErrorKind::parameter, "initial density must vanish at x = 0 and x = x_max");
    }
    const double mass = integrate(grid, m0);
    if (std::fabs(mass - 1.0) > 1e-8) {
        std::ostringstream os;
        os.precision(12);
        os << "initial density must integrate to 1 (got " << mass << ")";
        throw Error(ErrorKind::parameter, os.str());
    }
}

void check_jump_cfl(const Grid& grid, const JumpOperator& L) {
    const double rate = L.total_mass + std::fabs(L.drift) / grid.dx;
    if (grid.dt * rate > 1.0) {
        std::ostringstream os;
        os << "explicit jump step violates dt * (jump mass + |b_F| / dx) <= 1 (" << grid.dt * rate << ")";
        throw Error(ErrorKind::config, os.str());
    }
}

namespace {

double velocity(double q, DriftSign sign) { return sign == DriftSign::sde ? -q : q; }

struct Tridiagonal {
    std::vector<double> lower, diag, upper;
};

// implicit part on nodes 1..nx: 1/dt - 1/2 s^2 Delta_h + upwind flux divergence,
// face flux F_{i+1/2} = max(v_i,0) m_i + min(v_{i+1},0) m_{i+1}
Tridiagonal assemble(const Grid& grid, std::span<const double> q, double s2, DriftSign sign) {
    const std::size_t k = grid.nx;
    const double dx = grid.dx;
    const double a = 0.5 * s2 / (dx * dx);
    Tridiagonal m{std::vector<double>(k), std::vector<double>(k), std::vector<double>(k)};
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t i = j + 1;
        m.diag[j] = 1.0 / grid.dt + 2.0 * a + std::fabs(velocity(q[i], sign)) / dx;
        m.lower[j] = -a - std::max(velocity(q[i - 1], sign), 0.0) / dx;
        m.upper[j] = -a + std::min(velocity(q[i + 1], sign), 0.0) / dx;
    }
    return m;
}

} // namespace

FpStep fp_step(const Grid& grid, std::span<const double> m_n, std::span<const double> q,
               const JumpOperator& L, const FpConfig& cfg) {
    check_profile(grid, m_n, "m_n");
    check_profile(grid, q, "production rate");
    const std::size_t nodes = grid.nodes();
    const std::size_t k = grid.nx;  // unknowns at nodes 1..nx
    const double dt = grid.dt;
    const double dx = grid.dx;
    const double s2 = cfg.sigma * cfg.sigma + L.small_jump_variance;
    const double a = 0.5 * s2 / (dx * dx);

    const Profile jump = L.empty() ? Profile(nodes, 0.0) : L.apply_adjoint(m_n);
    const Tridiagonal mat = assemble(grid, q, s2, cfg.sign);
    std::vector<double> rhs(k), x(k);
    for (std::size_t j = 0; j < k; ++j) rhs[j] = m_n[j + 1] / dt + jump[j + 1];
    solve_tridiagonal(mat.lower, mat.diag, mat.upper, rhs, x);

    FpStep out;
    out.m.assign(nodes, 0.0);
    std::copy(x.begin(), x.end(), out.m.begin() + 1);

    const double m1 = out.m[1];
    const double mk = out.m[k];
    const double v1 = velocity(q[1], cfg.sign);
    const double vk = velocity(q[k], cfg.sign);
    out.flux.left = a * dx * m1 - std::min(v1, 0.0) * m1;
    out.flux.right = a * dx * mk + std::max(vk, 0.0) * mk;
    double gained = 0.0;
    for (std::size_t i = 1; i <= k; ++i) gained += jump[i];
    out.flux.jump = -dx * gained;
    return out;
}

Profile fp_residual(const Grid& grid, std::span<const double> m_next, std::span<const double> m_n,
                    std::span<const double> q, const JumpOperator& L, const FpConfig& cfg) {
    check_profile(grid, m_next, "m_next");
    check_profile(grid, m_n, "m_n");
    check_profile(grid, q, "production rate");
    const double s2 = cfg.sigma * cfg.sigma + L.small_jump_variance;
    const Tridiagonal mat = assemble(grid, q, s2, cfg.sign);
    const Profile jump = L.empty() ? Profile(grid.nodes(), 0.0) : L.apply_adjoint(m_n);
    const std::size_t k = grid.nx;
    Profile res(grid.nodes(), 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t i = j + 1;
        double v = mat.diag[j] * m_next[i] - m_n[i] / grid.dt - jump[i];
        if (j > 0) v += mat.lower[j] * m_next[i - 1];
        if (j + 1 < k) v += mat.upper[j] * m_next[i + 1];
        res[i] = v;
    }
    return res;
}

FpSolution fp_solve(const Grid& grid, const FpConfig& cfg, const JumpOperator& L, const Field& q,
                    double lambda) {
    if (q.levels() != grid.nt + 1 || q.cols() != grid.nodes()) {
        throw Error(ErrorKind::dimension, "policy field does not match the grid");
    }
    FpSolution sol;
    sol.m = Field(grid, Unit::density, true);
    Profile m(cfg.m0);
    check_profile(grid, m, "initial density");
    for (double& v : m) v *= lambda;
    sol.m.set_row(0, m);
    sol.eta.assign(grid.nt + 1, 0.0);
    sol.eta[0] = integrate(grid, sol.m.row(0));
    const double s2 = cfg.sigma * cfg.sigma + L.small_jump_variance;
    for (std::size_t n = 0; n < grid.nt; ++n) {
        FpStep step = fp_step(grid, sol.m.row(n), q.row(n), L, cfg);
        sol.m.set_row(n + 1, step.m);
        sol.eta[n + 1] = integrate(grid, step.m);
        sol.boundary_flux.push_back(0.5 * s2 * step.m[1] / grid.dx);
        sol.left_flux.push_back(step.flux.left);
        sol.right_flux.push_back(step.flux.right);
        sol.jump_flux.push_back(step.flux.jump);
    }
    return sol;
}

} // namespace mfg
