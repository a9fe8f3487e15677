#include "mfg/verify.hpp"

#include "mfg/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mfg {

bool VerificationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check& VerificationReport::find(const std::string& name) const {
    for (const Check& c : checks) {
        if (c.name == name) return c;
    }
    throw Error(ErrorKind::parameter, "no check named '" + name + "'");
}

namespace {

double sup_abs(std::span<const double> f) {
    double s = 0.0;
    for (double v : f) s = std::max(s, std::fabs(v));
    return s;
}

Profile phi_at(const Grid& grid, const Field& u, std::size_t n) {
    return backward_gradient(grid, u.row(n < grid.nt ? n + 1 : grid.nt));
}

double holder_fit(const Grid& grid, const std::vector<double>& eta) {
    std::vector<double> lx, ly;
    for (std::size_t lag = 1; lag <= grid.nt / 2; lag *= 2) {
        double worst = 0.0;
        for (std::size_t n = 0; n + lag < eta.size(); ++n) worst = std::max(worst, std::fabs(eta[n + lag] - eta[n]));
        if (worst <= 0.0) continue;
        lx.push_back(std::log(static_cast<double>(lag) * grid.dt));
        ly.push_back(std::log(worst));
    }
    if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sx += lx[k];
        sy += ly[k];
        sxx += lx[k] * lx[k];
        sxy += lx[k] * ly[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Check make(std::string name, std::string statement, double measured, double bound, double tol, bool ok) {
    Check c;
    c.name = std::move(name);
    c.statement = std::move(statement);
    c.measured = measured;
    c.bound = bound;
    c.tol = tol;
    c.passed = ok;
    return c;
}

Check not_applicable(std::string name, std::string statement) {
    Check c = make(std::move(name), std::move(statement), 0.0, 0.0, 0.0, true);
    c.applicable = false;
    return c;
}

} // namespace

VerificationReport run_checks(const Problem& problem, const Field& u, const Field& m,
                              const std::vector<double>& aggregate, double lambda, double C) {
    const Grid& grid = problem.grid;
    if (u.levels() != grid.nt + 1 || m.levels() != grid.nt + 1 || u.cols() != grid.nodes() ||
        m.cols() != grid.nodes()) {
        throw Error(ErrorKind::dimension, "solution fields do not match the grid");
    }
    if (aggregate.size() != grid.nt + 1) throw Error(ErrorKind::dimension, "aggregate trace length mismatch");

    const DemandModel& model = problem.model;
    VerificationReport rep;
    const double tol = C * (grid.dx + grid.dt);
    rep.tol = tol;
    const std::size_t nt = grid.nt;
    const std::span<const double> terminal = u.row(nt);
    const Profile terminal_grad = backward_gradient(grid, terminal);
    const double c0 = -std::min(*std::min_element(terminal_grad.begin(), terminal_grad.end()), 0.0);

    std::vector<double> eta(nt + 1);
    for (std::size_t n = 0; n <= nt; ++n) eta[n] = integrate(grid, m.row(n));

    // (1) bounds on u, with |H|_inf recomputed along the stored trajectory
    double h_sup = 0.0;
    double h_max = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n <= nt; ++n) {
        const Profile phi = phi_at(grid, u, n);
        for (std::size_t i = 1; i < grid.nodes(); ++i) {
            const double h = hamiltonian(model, grid.t(n), phi[i], aggregate[n], eta[n]);
            h_sup = std::max(h_sup, std::fabs(h));
            h_max = std::max(h_max, h);
        }
    }
    if (lambda == 0.0) h_max = 0.0;
    {
        const double T = grid.horizon;
        const double upper = T * std::exp(problem.hjb.r * T) * lambda * h_sup + sup_abs(terminal);
        const double lo = u.min();
        const double hi = u.max();
        const bool ok = lo >= -tol && hi <= upper + tol;
        Check c = make("u_bounds", "0 <= u <= T e^{rT} |H|_inf + |u_T|_inf", hi, upper, tol, ok);
        if (lo < -tol) c.measured = lo;
        rep.checks.push_back(c);
    }
    // (2) lower bound on u_x
    {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n <= nt; ++n) {
            const Profile g = backward_gradient(grid, u.row(n));
            worst = std::min(worst, *std::min_element(g.begin() + 1, g.end()));
        }
        rep.checks.push_back(make("ux_lower", "u_x >= -c0", worst, -c0, tol, worst >= -c0 - tol));
    }
    // (3) positivity of m
    {
        const double lo = m.min();
        rep.checks.push_back(make("m_nonnegative", "m >= -1e-12", lo, 0.0, 1e-12, lo >= -1e-12));
    }
    // (4) mass trace
    {
        double rise = 0.0;
        for (std::size_t n = 0; n < nt; ++n) rise = std::max(rise, eta[n + 1] - eta[n]);
        const bool start_ok = std::fabs(eta[0] - lambda) <= 1e-8;
        Check c = make("eta_monotone", "eta(0) = lambda and eta non-increasing", eta[0], lambda, tol,
                       start_ok && rise <= tol);
        if (start_ok) c.measured = rise, c.bound = 0.0;
        rep.checks.push_back(c);
    }
    // (5) duality bound
    {
        const double bound = sup_abs(terminal_grad) + 2.0 * c0;
        double worst = 0.0;
        rep.duality_trace.resize(nt + 1);
        for (std::size_t n = 0; n <= nt; ++n) {
            const Profile g = backward_gradient(grid, u.row(n));
            const double v = inner(grid, g, m.row(n));
            rep.duality_trace[n] = std::exp(-problem.hjb.r * grid.t(n)) * v;
            worst = std::max(worst, std::fabs(v));
        }
        rep.checks.push_back(make("duality_bound", "|int u_x m dx| <= |u_T'|_inf + 2 c0", worst, bound, tol,
                                  worst <= bound + tol));
    }
    // (6) aggregate bounds
    if (model.variant == Variant::bertrand_exp || model.variant == Variant::bertrand_power ||
        model.variant == Variant::cournot_power || model.variant == Variant::cournot_log) {
        double worst_excess = -std::numeric_limits<double>::infinity();
        double at_value = 0.0, at_bound = 0.0;
        for (std::size_t n = 0; n <= nt; ++n) {
            const Profile phi = phi_at(grid, u, n);
            const double t = grid.t(n);
            double bound = 0.0;
            if (model.bertrand()) {
                if (eta[n] > 0.0) {
                    const double beta = model.beta();
                    bound = sup_abs(phi) / ((1.0 - beta) * model.delta0()) +
                            pstar(model, t, eta[n], 0.0, 0.0) / (1.0 - beta);
                }
            } else {
                bound = qstar(model, t, *std::min_element(phi.begin(), phi.end()), 0.0) * eta[n];
            }
            const double excess = std::max(aggregate[n] - bound, -aggregate[n]);
            if (excess > worst_excess) {
                worst_excess = excess;
                at_value = aggregate[n];
                at_bound = bound;
            }
        }
        const double slack = 1e-10 * std::max(1.0, at_bound);
        rep.checks.push_back(make("aggregate_bound", model.bertrand() ? "0 <= pi <= clearing bound" : "0 <= Q <= q*(min phi, 0) |m|_1",
                                  at_value, at_bound, slack, worst_excess <= slack));
    } else {
        rep.checks.push_back(not_applicable("aggregate_bound", "aggregate has no a priori bound for this model"));
    }
    // (7) payoff bound for the Cournot families
    if (model.variant == Variant::cournot_power || model.variant == Variant::cournot_log) {
        const double bound = std::exp(c0) * (1.0 + c0);
        rep.checks.push_back(make("cournot_payoff", "max H <= e^{c0} (1 + c0)", h_max, bound, tol, h_max <= bound + tol));
    } else {
        rep.checks.push_back(not_applicable("cournot_payoff", "Cournot families only"));
    }

    rep.eta_holder_exponent = holder_fit(grid, eta);
    return rep;
}

std::string report_text(const VerificationReport& report) {
    std::ostringstream os;
    os << std::setprecision(6);
    os << "verification (tol = " << report.tol << ")\n";
    for (const Check& c : report.checks) {
        os << "  " << std::left << std::setw(18) << c.name << ' ';
        if (!c.applicable) {
            os << "n/a   " << c.statement << '\n';
            continue;
        }
        os << (c.passed ? "PASS  " : "FAIL  ") << c.statement << "  measured " << c.measured << " bound "
           << c.bound << " tol " << c.tol << '\n';
    }
    os << "  eta Hoelder exponent (fit): " << report.eta_holder_exponent << '\n';
    os << (report.all_passed() ? "all checks passed\n" : "some checks FAILED\n");
    return os.str();
}

std::string report_csv(const VerificationReport& report) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "name,applicable,passed,measured,bound,tol\n";
    for (const Check& c : report.checks) {
        os << c.name << ',' << (c.applicable ? 1 : 0) << ',' << (c.passed ? 1 : 0) << ',' << c.measured << ','
           << c.bound << ',' << c.tol << '\n';
    }
    os << "eta_holder_exponent,1,1," << report.eta_holder_exponent << ",0,0\n";
    return os.str();
}

double variational_objective(const Grid& grid, const Field& m, const Field& q, double eps, double r,
                             std::span<const double> terminal) {
    if (m.levels() != grid.nt + 1 || q.levels() != grid.nt + 1 || m.cols() != grid.nodes() ||
        q.cols() != grid.nodes()) {
        throw Error(ErrorKind::dimension, "objective fields do not match the grid");
    }
    check_profile(grid, terminal, "terminal profile");
    double J = 0.0;
    Profile cost(grid.nodes());
    for (std::size_t n = 0; n < grid.nt; ++n) {
        const auto qn = q.row(n);
        for (std::size_t i = 0; i < cost.size(); ++i) cost[i] = qn[i] * qn[i] - qn[i];
        const double Q = inner(grid, qn, m.row(n));
        J += grid.dt * std::exp(-r * grid.t(n)) * (inner(grid, cost, m.row(n)) + 0.5 * eps * Q * Q);
    }
    J -= std::exp(-r * grid.horizon) * inner(grid, terminal, m.row(grid.nt));
    return -J;
}

} // namespace mfg
