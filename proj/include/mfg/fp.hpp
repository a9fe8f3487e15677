#pragma once

#include "mfg/grid.hpp"
#include "mfg/levy.hpp"

#include <span>
#include <vector>

namespace mfg {

/// sde: m_t = 1/2 s^2 m_xx + (q m)_x, mass drifts toward x = 0.
/// verbatim: m_t = 1/2 s^2 m_xx - (q m)_x.
enum class DriftSign { sde, verbatim };

struct FpConfig {
    double sigma = 0.5;
    Profile m0;
    DriftSign sign = DriftSign::sde;

    void validate(const Grid& grid) const;
};

/// Outflow of one step, split by exit route (mass per unit time).
struct FpFluxes {
    double left = 0.0;   ///< through x = 0 (diffusive + advective)
    double right = 0.0;  ///< through x_max
    double jump = 0.0;   ///< jumps landing outside the interior nodes
};

struct FpStep {
    Profile m;
    FpFluxes flux;
};

/// One IMEX step: implicit diffusion and upwind transport, explicit jumps.
/// `q` is the non-negative production rate at each node (already scaled by lambda).
FpStep fp_step(const Grid& grid, std::span<const double> m_n, std::span<const double> q,
               const JumpOperator& L, const FpConfig& cfg);

/// Residual (A m_{n+1} - rhs)_i of the step equation for a given pair of rows.
Profile fp_residual(const Grid& grid, std::span<const double> m_next, std::span<const double> m_n,
                    std::span<const double> q, const JumpOperator& L, const FpConfig& cfg);

struct FpSolution {
    Field m;
    std::vector<double> eta;
    std::vector<double> boundary_flux;  ///< 1/2 s^2 m_x(t_n, 0) for steps n = 0..nt-1
    std::vector<double> left_flux;
    std::vector<double> right_flux;
    std::vector<double> jump_flux;
};

/// Forward sweep from lambda * m0 with the policy levels q(t_0..t_{nt-1}).
FpSolution fp_solve(const Grid& grid, const FpConfig& cfg, const JumpOperator& L, const Field& q,
                    double lambda);

/// Rejects dt (Lambda + |b_F| / dx) > 1, the positivity limit of the explicit jump step.
void check_jump_cfl(const Grid& grid, const JumpOperator& L);

} // namespace mfg
