#pragma once

#include <string>

namespace mfg {

enum class EpsShape { linear_to_zero, constant_then_ramp, constant };

/// Time profile of the substitutability coefficient epsilon(t).
///
/// linear_to_zero: eps0 (1 - t/T). constant_then_ramp: eps0 up to t_knee, then
/// linear to zero at T. constant: eps0 throughout (only meaningful for the
/// linear-quadratic model, which does not need eps(T) = 0).
struct EpsSchedule {
    double eps0 = 0.0;
    EpsShape shape = EpsShape::linear_to_zero;
    double t_knee = 0.0;
    double horizon = 1.0;

    double operator()(double t) const;
    void validate() const;
};

enum class Variant { bertrand_exp, bertrand_power, cournot_power, cournot_log, linear_quadratic, constant };

enum class Aggregate { price, quantity, none };

struct DemandModel {
    Variant variant = Variant::bertrand_exp;
    double rho = 1.0;
    EpsSchedule eps;
    double constant_h = 0.0;  // Variant::constant only

    static DemandModel bertrand_exp(EpsSchedule eps);
    static DemandModel bertrand_power(double rho, EpsSchedule eps);
    static DemandModel cournot_power(double rho, EpsSchedule eps);
    static DemandModel cournot_log(EpsSchedule eps);
    static DemandModel linear_quadratic(EpsSchedule eps);
    /// H identically equal to h; with h = 0 the value equation reduces to a heat equation.
    static DemandModel constant(double h, double horizon);

    void validate() const;
    Aggregate aggregate() const;
    bool bertrand() const { return aggregate() == Aggregate::price; }
    bool cournot() const { return aggregate() == Aggregate::quantity; }
    std::string name() const;

    double a(double t, double eta) const;
    double c(double t, double eta) const;
    /// c(t, eta) / eta, continued to eta = 0 by eps(t).
    double c_over_eta(double t, double eta) const;

    double delta0() const;
    /// Contraction constant of the price fixed point.
    double beta() const;
};

Variant parse_variant(const std::string& name);
std::string to_string(Variant v);

/// Demand D(p, pbar) with pbar = pi / eta (Bertrand variants).
double demand(const DemandModel& model, double t, double eta, double p, double pi);

/// Inverse demand P(t, q, Q) (Cournot variants and linear_quadratic).
double inverse_demand(const DemandModel& model, double t, double q, double Q);

/// Optimal price; throws degenerate_market for eta <= 0 and wrong_variant for
/// non-Bertrand models.
double pstar(const DemandModel& model, double t, double eta, double xi, double pi);

/// Optimal quantity; linear_quadratic returns the unconstrained maximiser.
double qstar(const DemandModel& model, double t, double xi, double Q);

struct HamiltonianValue {
    double h = 0.0;
    double dh = 0.0;   ///< D_xi H = -(equilibrium production)
    double d2h = 0.0;  ///< D_xi^2 H, interior one-sided value at the kink
};

/// H and its xi-derivatives at one point. Bertrand models accept eta = 0
/// through the removable limit of c / eta.
HamiltonianValue evaluate(const DemandModel& model, double t, double xi, double agg, double eta);

double hamiltonian(const DemandModel& model, double t, double xi, double agg, double eta);
double dH_dxi(const DemandModel& model, double t, double xi, double agg, double eta);
double d2H_dxi2(const DemandModel& model, double t, double xi, double agg, double eta);

/// Price and quantity chosen by a producer facing marginal value xi.
struct Action {
    double price = 0.0;
    double quantity = 0.0;
    double revenue = 0.0;  ///< running payoff rate; price * quantity except for Variant::constant
};
Action optimal_action(const DemandModel& model, double t, double xi, double agg, double eta);

} // namespace mfg
