#include "mfg/market.hpp"

#include "mfg/error.hpp"
#include "mfg/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfg {

namespace {

void check_inputs(const Grid& grid, std::span<const double> phi, std::span<const double> m) {
    check_profile(grid, phi, "marginal value profile");
    check_profile(grid, m, "density profile");
}

double sup_norm(std::span<const double> f) {
    double out = 0.0;
    for (double v : f) out = std::max(out, std::fabs(v));
    return out;
}

// d/dQ of int q*(phi, Q) m dx, from implicit differentiation of h(q*, Q) = xi.
double quantity_slope(const DemandModel& model, const Grid& grid, double t, std::span<const double> phi,
                      std::span<const double> m, double Q) {
    const double e = model.eps(t);
    if (e == 0.0) return 0.0;
    const double rho = model.variant == Variant::cournot_log ? 0.0 : model.rho;
    Profile dq(grid.nodes(), 0.0);
    for (std::size_t i = 0; i < dq.size(); ++i) {
        if (m[i] == 0.0) continue;
        const double q = qstar(model, t, phi[i], Q);
        if (q <= 0.0) continue;
        const double eq = e * Q;
        dq[i] = -e * (rho * q + eq) / ((1.0 + rho) * q + 2.0 * eq);
    }
    return inner(grid, dq, m);
}

} // namespace

double clearing_map(const DemandModel& model, const Grid& grid, double t, std::span<const double> phi,
                    std::span<const double> m, double value) {
    check_inputs(grid, phi, m);
    const double eta = integrate(grid, m);
    Profile f(grid.nodes(), 0.0);
    if (model.bertrand()) {
        if (!(eta > 0.0)) return 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = pstar(model, t, eta, phi[i], value);
    } else if (model.cournot()) {
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = qstar(model, t, phi[i], value);
    } else {
        return 0.0;
    }
    return inner(grid, f, m);
}

ClearingResult clear_bertrand(const DemandModel& model, const Grid& grid, double t,
                              std::span<const double> phi, std::span<const double> m,
                              const ClearingOptions& opts) {
    if (!model.bertrand()) throw Error(ErrorKind::wrong_variant, "clear_bertrand needs a Bertrand model");
    check_inputs(grid, phi, m);
    ClearingResult out;
    const double eta = integrate(grid, m);
    if (!(eta > 0.0)) return out;

    const double beta = model.beta();
    out.bound = sup_norm(phi) / ((1.0 - beta) * model.delta0()) + pstar(model, t, eta, 0.0, 0.0) / (1.0 - beta);

    double pi = 0.0;
    if (model.variant == Variant::bertrand_exp) {
        // p* does not depend on pi, so one evaluation is the fixed point
        pi = clearing_map(model, grid, t, phi, m, 0.0);
        out.iterations = 1;
        out.increments.push_back(pi);
        out.final_residual = std::fabs(clearing_map(model, grid, t, phi, m, pi) - pi);
    } else {
        bool done = false;
        while (out.iterations < opts.price_cap) {
            const double next = clearing_map(model, grid, t, phi, m, pi);
            ++out.iterations;
            const double step = std::fabs(next - pi);
            out.increments.push_back(step);
            pi = next;
            if (step <= opts.tol) {
                done = true;
                break;
            }
        }
        if (!done) {
            throw Error(ErrorKind::contraction_failure,
                        "price fixed point did not converge in " + std::to_string(opts.price_cap) + " iterations");
        }
        out.final_residual = out.increments.back();
    }
    out.value = pi;
    out.bound_check = pi >= 0.0 && pi <= out.bound;
    return out;
}

ClearingResult clear_cournot(const DemandModel& model, const Grid& grid, double t,
                             std::span<const double> phi, std::span<const double> m,
                             const ClearingOptions& opts) {
    if (!model.cournot()) throw Error(ErrorKind::wrong_variant, "clear_cournot needs a quantity model");
    check_inputs(grid, phi, m);
    ClearingResult out;
    const double eta = integrate(grid, m);

    if (model.variant == Variant::linear_quadratic) {
        // unconstrained q* is affine in Q: Q = (eta - int phi m) / (2 + eps eta)
        out.value = (eta - inner(grid, phi, m)) / (2.0 + model.eps(t) * eta);
        out.iterations = 1;
        out.final_residual = std::fabs(out.value - clearing_map(model, grid, t, phi, m, out.value));
        out.bound = std::numeric_limits<double>::infinity();
        out.bound_check = true;
        return out;
    }

    const double phi_min = *std::min_element(phi.begin(), phi.end());
    const double hi = qstar(model, t, phi_min, 0.0) * eta;
    out.bound = hi;
    if (!(eta > 0.0) || hi <= 0.0) {
        out.bound_check = true;
        return out;
    }
    auto f = [&](double Q) { return Q - clearing_map(model, grid, t, phi, m, Q); };
    auto df = [&](double Q) { return 1.0 - quantity_slope(model, grid, t, phi, m, Q); };
    const double f_lo = f(0.0);
    const double f_hi = f(hi);
    if (f_lo > opts.tol || f_hi < -opts.tol) {
        throw Error(ErrorKind::assumption_violation, "aggregate quantity bracket does not contain a root");
    }
    RootResult r;
    if (std::fabs(f_lo) <= opts.tol) {
        r = {0.0, f_lo, 0, true};
    } else if (std::fabs(f_hi) <= opts.tol) {
        r = {hi, f_hi, 0, true};
    } else {
        r = safeguarded_newton(f, df, 0.0, hi, opts.tol, opts.quantity_cap);
    }
    if (!r.converged) {
        throw Error(ErrorKind::contraction_failure, "aggregate quantity solve did not converge");
    }
    out.value = r.x;
    out.iterations = r.iterations;
    out.final_residual = std::fabs(r.residual);
    out.increments.push_back(out.final_residual);
    out.bound_check = out.value >= 0.0 && out.value <= hi * (1.0 + 1e-12);
    return out;
}

ClearingResult clear_market(const DemandModel& model, const Grid& grid, double t,
                            std::span<const double> phi, std::span<const double> m,
                            const ClearingOptions& opts) {
    switch (model.aggregate()) {
        case Aggregate::price: return clear_bertrand(model, grid, t, phi, m, opts);
        case Aggregate::quantity: return clear_cournot(model, grid, t, phi, m, opts);
        case Aggregate::none: break;
    }
    check_inputs(grid, phi, m);
    return {};
}

} // namespace mfg
