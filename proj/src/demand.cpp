#include "mfg/demand.hpp"

#include "mfg/error.hpp"
#include "mfg/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfg {

namespace {

constexpr double kRootTol = 1e-12;
constexpr std::size_t kRootIter = 200;

void require(bool ok, const char* msg) {
    if (!ok) throw Error(ErrorKind::parameter, msg);
}

// A = a + (c / eta) pi, the exponent shift shared by both Bertrand demands.
double shift(const DemandModel& m, double t, double eta, double pi) {
    return m.a(t, eta) + m.c_over_eta(t, eta) * pi;
}

// Power demand base 1 + (A - p) / rho, before the positive part.
double power_base(double rho, double A, double p) { return 1.0 + (A - p) / rho; }

double bertrand_pstar(const DemandModel& m, double t, double eta, double xi, double pi) {
    if (m.variant == Variant::bertrand_exp) return std::max(xi + 1.0, 0.0);
    const double A = shift(m, t, eta, pi);
    const double rho = m.rho;
    auto g = [&](double p) { return p - std::max(power_base(rho, A, p), 0.0); };
    if (xi <= g(0.0)) return 0.0;
    auto f = [&](double p) { return g(p) - xi; };
    auto df = [&](double p) { return power_base(rho, A, p) > 0.0 ? 1.0 + 1.0 / rho : 1.0; };
    const double hi = std::max(xi, 0.0) + rho + A + 1.0;
    const RootResult r = safeguarded_newton(f, df, 0.0, hi, kRootTol, kRootIter);
    if (!r.converged) throw Error(ErrorKind::internal, "optimal price root search did not converge");
    return r.x;
}

double bertrand_demand(const DemandModel& m, double A, double p) {
    if (m.variant == Variant::bertrand_exp) return std::exp(A - p);
    return std::pow(std::max(power_base(m.rho, A, p), 0.0), m.rho);
}

double price_at_zero(const DemandModel& m, double eq) {
    if (m.variant == Variant::cournot_log) {
        return eq > 0.0 ? -std::log(eq) : std::numeric_limits<double>::infinity();
    }
    if (m.variant == Variant::linear_quadratic) return 1.0 - eq;
    return (1.0 - std::pow(eq, m.rho)) / m.rho;
}

// h(q) = q P_q + P and its q-derivative, for the Cournot families.
double cournot_h(const DemandModel& m, double q, double eq) {
    if (q == 0.0) return price_at_zero(m, eq);
    const double s = q + eq;
    if (m.variant == Variant::cournot_log) return -q / s - std::log(s);
    return -q * std::pow(s, m.rho - 1.0) + (1.0 - std::pow(s, m.rho)) / m.rho;
}

double cournot_dh(const DemandModel& m, double q, double eq) {
    const double rho = m.variant == Variant::cournot_log ? 0.0 : m.rho;
    const double s = q + eq;
    return -((1.0 + rho) * q + 2.0 * eq) / std::pow(s, 2.0 - rho);
}

double cournot_qstar(const DemandModel& m, double t, double xi, double Q) {
    const double eq = m.eps(t) * Q;
    if (m.variant == Variant::linear_quadratic) return 0.5 * (1.0 - eq - xi);
    if (xi >= price_at_zero(m, eq)) return 0.0;
    if (m.variant == Variant::cournot_power && m.rho == 1.0) return std::max(0.5 * (1.0 - xi - eq), 0.0);
    if (m.variant == Variant::cournot_log && eq == 0.0) return std::exp(-1.0 - xi);
    auto f = [&](double q) { return cournot_h(m, q, eq) - xi; };
    auto df = [&](double q) { return cournot_dh(m, q, eq); };
    double hi = 1.0;
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw Error(ErrorKind::assumption_violation, "optimal quantity is unbounded");
    }
    const RootResult r = safeguarded_newton(f, df, 0.0, hi, kRootTol, kRootIter);
    if (!r.converged) throw Error(ErrorKind::internal, "optimal quantity root search did not converge");
    return r.x;
}

} // namespace

double EpsSchedule::operator()(double t) const {
    switch (shape) {
        case EpsShape::constant: return eps0;
        case EpsShape::linear_to_zero: return eps0 * std::max(1.0 - t / horizon, 0.0);
        case EpsShape::constant_then_ramp:
            if (t <= t_knee) return eps0;
            return eps0 * std::max((horizon - t) / (horizon - t_knee), 0.0);
    }
    return eps0;
}

void EpsSchedule::validate() const {
    require(eps0 >= 0.0 && std::isfinite(eps0), "eps0 must be finite and >= 0");
    require(horizon > 0.0, "eps schedule horizon must be positive");
    if (shape == EpsShape::constant_then_ramp) {
        require(t_knee >= 0.0 && t_knee < horizon, "t_knee must lie in [0, T)");
    }
}

DemandModel DemandModel::bertrand_exp(EpsSchedule eps) {
    DemandModel m;
    m.variant = Variant::bertrand_exp;
    m.eps = eps;
    m.validate();
    return m;
}

DemandModel DemandModel::bertrand_power(double rho, EpsSchedule eps) {
    DemandModel m;
    m.variant = Variant::bertrand_power;
    m.rho = rho;
    m.eps = eps;
    m.validate();
    return m;
}

DemandModel DemandModel::cournot_power(double rho, EpsSchedule eps) {
    DemandModel m;
    m.variant = Variant::cournot_power;
    m.rho = rho;
    m.eps = eps;
    m.validate();
    return m;
}

DemandModel DemandModel::cournot_log(EpsSchedule eps) {
    DemandModel m;
    m.variant = Variant::cournot_log;
    m.rho = 0.0;
    m.eps = eps;
    m.validate();
    return m;
}

DemandModel DemandModel::linear_quadratic(EpsSchedule eps) {
    DemandModel m;
    m.variant = Variant::linear_quadratic;
    m.eps = eps;
    m.validate();
    return m;
}

DemandModel DemandModel::constant(double h, double horizon) {
    DemandModel m;
    m.variant = Variant::constant;
    m.constant_h = h;
    m.eps.horizon = horizon;
    m.validate();
    return m;
}

void DemandModel::validate() const {
    eps.validate();
    switch (variant) {
        case Variant::bertrand_power: require(rho >= 2.0, "bertrand_power needs rho >= 2"); break;
        case Variant::cournot_power: require(rho > 0.0 && rho <= 1.0, "cournot_power needs rho in (0, 1]"); break;
        case Variant::constant:
            require(constant_h >= 0.0 && std::isfinite(constant_h), "constant H must be finite and >= 0");
            break;
        default: break;
    }
    if (variant != Variant::linear_quadratic && variant != Variant::constant) {
        require(eps.shape != EpsShape::constant || eps.eps0 == 0.0,
                "a constant eps schedule is reserved for linear_quadratic");
    }
}

Aggregate DemandModel::aggregate() const {
    switch (variant) {
        case Variant::bertrand_exp:
        case Variant::bertrand_power: return Aggregate::price;
        case Variant::cournot_power:
        case Variant::cournot_log:
        case Variant::linear_quadratic: return Aggregate::quantity;
        case Variant::constant: return Aggregate::none;
    }
    return Aggregate::none;
}

std::string DemandModel::name() const { return to_string(variant); }

double DemandModel::a(double t, double eta) const { return 1.0 / (1.0 + eps(t) * eta); }

double DemandModel::c(double t, double eta) const {
    const double e = eps(t) * eta;
    return e / (1.0 + e);
}

double DemandModel::c_over_eta(double t, double eta) const {
    const double e = eps(t);
    return e / (1.0 + e * eta);
}

double DemandModel::delta0() const { return bertrand() ? 1.0 : 0.0; }

double DemandModel::beta() const {
    if (variant == Variant::bertrand_power) return eps.eps0 / (1.0 + eps.eps0);
    return 0.0;
}

Variant parse_variant(const std::string& name) {
    for (Variant v : {Variant::bertrand_exp, Variant::bertrand_power, Variant::cournot_power,
                      Variant::cournot_log, Variant::linear_quadratic, Variant::constant}) {
        if (to_string(v) == name) return v;
    }
    throw Error(ErrorKind::parameter, "unknown demand model '" + name + "'");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::bertrand_exp: return "bertrand_exp";
        case Variant::bertrand_power: return "bertrand_power";
        case Variant::cournot_power: return "cournot_power";
        case Variant::cournot_log: return "cournot_log";
        case Variant::linear_quadratic: return "linear_quadratic";
        case Variant::constant: return "constant";
    }
    return "unknown";
}

double demand(const DemandModel& model, double t, double eta, double p, double pi) {
    if (!model.bertrand()) throw Error(ErrorKind::wrong_variant, "demand() needs a Bertrand model");
    return bertrand_demand(model, shift(model, t, eta, pi), p);
}

double inverse_demand(const DemandModel& model, double t, double q, double Q) {
    const double s = q + model.eps(t) * Q;
    switch (model.variant) {
        case Variant::cournot_log: return -std::log(s);
        case Variant::cournot_power: return (1.0 - std::pow(s, model.rho)) / model.rho;
        case Variant::linear_quadratic: return 1.0 - s;
        default: throw Error(ErrorKind::wrong_variant, "inverse_demand() needs a quantity model");
    }
}

double pstar(const DemandModel& model, double t, double eta, double xi, double pi) {
    if (!model.bertrand()) throw Error(ErrorKind::wrong_variant, "pstar() needs a Bertrand model");
    if (!(eta > 0.0)) throw Error(ErrorKind::degenerate_market, "pstar() needs positive mass");
    return bertrand_pstar(model, t, eta, xi, pi);
}

double qstar(const DemandModel& model, double t, double xi, double Q) {
    if (!model.cournot()) throw Error(ErrorKind::wrong_variant, "qstar() needs a quantity model");
    if (!(Q >= 0.0)) throw Error(ErrorKind::parameter, "aggregate quantity must be >= 0");
    return cournot_qstar(model, t, xi, Q);
}

HamiltonianValue evaluate(const DemandModel& model, double t, double xi, double agg, double eta) {
    HamiltonianValue out;
    switch (model.variant) {
        case Variant::constant: out.h = model.constant_h; return out;
        case Variant::bertrand_exp:
        case Variant::bertrand_power: {
            if (eta < 0.0) throw Error(ErrorKind::degenerate_market, "negative mass");
            const double A = shift(model, t, eta, agg);
            const double p = bertrand_pstar(model, t, eta, xi, agg);
            const double d = bertrand_demand(model, A, p);
            out.h = d * (p - xi);
            out.dh = -d;
            if (model.variant == Variant::bertrand_exp) {
                out.d2h = xi >= -1.0 ? d : 0.0;
            } else {
                const double base = power_base(model.rho, A, p);
                const double kink = -std::max(power_base(model.rho, A, 0.0), 0.0);
                if (xi >= kink && base > 0.0) {
                    // -D_p D / D_p g on the active branch
                    out.d2h = std::pow(base, model.rho - 1.0) / (1.0 + 1.0 / model.rho);
                }
            }
            return out;
        }
        case Variant::linear_quadratic: {
            const double q = 0.5 * (1.0 - model.eps(t) * agg - xi);
            out.h = q * q;
            out.dh = -q;
            out.d2h = 0.5;
            return out;
        }
        case Variant::cournot_power:
        case Variant::cournot_log: {
            if (!(agg >= 0.0)) throw Error(ErrorKind::parameter, "aggregate quantity must be >= 0");
            const double eq = model.eps(t) * agg;
            const double q = cournot_qstar(model, t, xi, agg);
            const double p0 = price_at_zero(model, eq);
            if (q > 0.0) out.h = q * (inverse_demand(model, t, q, agg) - xi);
            out.dh = -q;
            if (xi <= p0) {
                if (q + eq > 0.0) {
                    out.d2h = -1.0 / cournot_dh(model, q, eq);
                } else {
                    out.d2h = model.variant == Variant::cournot_power && model.rho == 1.0 ? 0.5 : 0.0;
                }
            }
            return out;
        }
    }
    return out;
}

double hamiltonian(const DemandModel& model, double t, double xi, double agg, double eta) {
    return evaluate(model, t, xi, agg, eta).h;
}

double dH_dxi(const DemandModel& model, double t, double xi, double agg, double eta) {
    return evaluate(model, t, xi, agg, eta).dh;
}

double d2H_dxi2(const DemandModel& model, double t, double xi, double agg, double eta) {
    return evaluate(model, t, xi, agg, eta).d2h;
}

Action optimal_action(const DemandModel& model, double t, double xi, double agg, double eta) {
    Action a;
    switch (model.variant) {
        case Variant::constant: a.revenue = model.constant_h; return a;
        case Variant::bertrand_exp:
        case Variant::bertrand_power:
            a.price = bertrand_pstar(model, t, eta, xi, agg);
            a.quantity = bertrand_demand(model, shift(model, t, eta, agg), a.price);
            break;
        default:
            a.quantity = cournot_qstar(model, t, xi, agg);
            a.price = a.quantity > 0.0 || model.variant == Variant::linear_quadratic
                          ? inverse_demand(model, t, a.quantity, agg)
                          : price_at_zero(model, model.eps(t) * agg);
            break;
    }
    a.revenue = a.quantity != 0.0 ? a.price * a.quantity : 0.0;
    return a;
}

} // namespace mfg
