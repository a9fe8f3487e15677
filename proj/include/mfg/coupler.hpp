#pragma once

#include "mfg/demand.hpp"
#include "mfg/fp.hpp"
#include "mfg/grid.hpp"
#include "mfg/hjb.hpp"
#include "mfg/levy.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mfg {

enum class Scheme { picard, fictitious_play };

/// How the first outer iterate m^0 is chosen.
/// propagated: FP sweep with zero production. uniform: lambda / x_max on the
/// interior nodes at every level.
enum class InitMode { propagated, uniform };

struct CouplerConfig {
    double damping = 0.5;
    double tol = 1e-7;
    std::size_t max_iter = 500;
    Scheme scheme = Scheme::picard;
    std::vector<double> lambda_ladder{1.0};
    InitMode init = InitMode::propagated;

    void validate() const;
};

struct Problem {
    Grid grid;
    DemandModel model;
    HjbConfig hjb;
    FpConfig fp;
    JumpOperator jumps;
};

struct IterationLog {
    std::size_t iteration = 0;
    double lambda = 1.0;
    double change = 0.0;    ///< |m^{k+1} - m^k|_inf
    double residual = 0.0;  ///< |T(m^k) - m^k|_inf
};

struct EquilibriumSolution {
    Field u;
    Field m;
    Field drift;        ///< production rate q at each level
    Field hamiltonian;  ///< H along the solution
    std::vector<double> eta;
    std::vector<double> aggregate;
    std::vector<double> pbar;  ///< aggregate / eta, 0 where eta = 0
    std::vector<double> left_flux;
    std::vector<double> right_flux;
    std::vector<double> jump_flux;
    std::vector<double> history;  ///< sup-norm change of m between outer iterates
    std::vector<IterationLog> log;
    std::vector<double> lambda_path;
    double lambda = 1.0;
    bool converged = false;
    bool clearing_bounds_ok = true;
    std::size_t iterations = 0;
};

using IterationCallback = std::function<void(const IterationLog&)>;

/// Outer fixed-point loop over (HJB, FP). Returns a non-converged solution
/// (converged = false) when the iteration cap is reached at any ladder stage.
EquilibriumSolution solve_mfg(const Problem& problem, const CouplerConfig& cfg,
                              const IterationCallback& on_iteration = {});

/// Initial density field for the outer loop at the given lambda.
Field initial_guess(const Problem& problem, InitMode mode, double lambda);

struct ResidualNorms {
    double hjb_sup = 0.0;
    double hjb_l2 = 0.0;
    double fp_sup = 0.0;
    double fp_l2 = 0.0;
};

/// Discrete HJB and FP residuals of a pair (u, m) with self-consistent aggregates.
ResidualNorms residual(const Problem& problem, const Field& u, const Field& m, double lambda);

struct PolicyFields {
    Field production;  ///< q = -lambda D_xi H
    Field revenue;     ///< running payoff rate lambda p q
};

/// Rebuilds the equilibrium policy from stored outputs: level n uses the
/// backward gradient of u at level n+1 (level nt uses u_T) and the stored
/// aggregate and mass traces.
PolicyFields derive_policy(const Problem& problem, const Field& u, const std::vector<double>& aggregate,
                           const std::vector<double>& eta, double lambda);

Scheme parse_scheme(const std::string& s);
InitMode parse_init(const std::string& s);

} // namespace mfg
