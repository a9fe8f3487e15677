#pragma once

#include "mfg/coupler.hpp"
#include "mfg/grid.hpp"

#include <string>
#include <vector>

namespace mfg {

struct Check {
    std::string name;
    std::string statement;
    double measured = 0.0;
    double bound = 0.0;
    double tol = 0.0;
    bool applicable = true;
    bool passed = true;
};

struct VerificationReport {
    std::vector<Check> checks;
    /// e^{-r t_n} int u_x(t_n) m(t_n) dx, informational.
    std::vector<double> duality_trace;
    /// Exponent of max |eta(t+h) - eta(t)| ~ h^alpha fitted over dyadic lags; NaN if undefined.
    double eta_holder_exponent = 0.0;
    double tol = 0.0;

    bool all_passed() const;
    const Check& find(const std::string& name) const;
};

/// Evaluates the a priori bound suite from (u, m, aggregate trace) and the
/// problem data only. `C` scales the discretisation tolerance C (dx + dt).
VerificationReport run_checks(const Problem& problem, const Field& u, const Field& m,
                              const std::vector<double>& aggregate, double lambda, double C = 10.0);

std::string report_text(const VerificationReport& report);
std::string report_csv(const VerificationReport& report);

/// Potential W(m, q) = -J(m, q) of the linear model, where J is
///   int int e^{-rt} (q^2 - q) m + eps/2 int e^{-rt} (int q m)^2 - e^{-rT} int u_T m(T).
/// W is maximised by the equilibrium pair. Left rectangle rule in time,
/// trapezoid in space.
double variational_objective(const Grid& grid, const Field& m, const Field& q, double eps, double r,
                             std::span<const double> terminal);

} // namespace mfg
