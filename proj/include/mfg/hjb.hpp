#pragma once

#include "mfg/demand.hpp"
#include "mfg/grid.hpp"
#include "mfg/levy.hpp"
#include "mfg/market.hpp"

#include <span>
#include <vector>

namespace mfg {

struct HjbConfig {
    double sigma = 0.5;
    double r = 0.0;
    Profile terminal;  ///< u_T on the grid nodes
    double compat_tol = 1e-2;
    /// Re-clear the market with the freshly computed u_n until the aggregate
    /// moves less than 1e-8.
    bool inner_loop = false;

    void validate(const Grid& grid) const;
};

/// c0 = -min(min u_T', 0) from the backward differences of the terminal row.
double terminal_c0(const Grid& grid, std::span<const double> terminal);

/// |1/2 s^2 u_T''(0) - r u_T(0) + H_T(u_T'(0)) + (L u_T)(0)| with one-sided
/// differences at the boundary node.
double check_compatibility(const Grid& grid, const HjbConfig& cfg, const JumpOperator& L,
                           const DemandModel& model);

struct HjbStep {
    Profile u;
    double aggregate = 0.0;
    double eta = 0.0;
    Profile drift;        ///< q = -lambda D_xi H >= 0 at each node
    Profile hamiltonian;  ///< H at each node (unscaled by lambda)
    ClearingResult clearing;
};

/// One backward Euler step from level n+1 to level n.
HjbStep hjb_step(const Grid& grid, std::span<const double> u_next, std::size_t n,
                 std::span<const double> m_n, const JumpOperator& L, const HjbConfig& cfg,
                 const DemandModel& model, double lambda);

/// Residual of the level-n scheme equation, (A u_n - rhs)_i, for a given pair
/// of consecutive rows; aggregates are re-cleared from (u_next, m_n).
Profile hjb_residual(const Grid& grid, std::span<const double> u_n, std::span<const double> u_next,
                     std::size_t n, std::span<const double> m_n, const JumpOperator& L,
                     const HjbConfig& cfg, const DemandModel& model, double lambda);

struct HjbSolution {
    Field u;
    Field drift;        ///< level nt is evaluated on the terminal row
    Field hamiltonian;
    std::vector<double> aggregate;
    std::vector<double> eta;
    bool clearing_bounds_ok = true;
    std::size_t clearing_iterations = 0;
};

HjbSolution hjb_solve(const Grid& grid, const HjbConfig& cfg, const JumpOperator& L,
                      const DemandModel& model, const Field& m, double lambda);

} // namespace mfg
