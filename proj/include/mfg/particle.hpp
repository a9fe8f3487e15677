#pragma once

#include "mfg/grid.hpp"
#include "mfg/levy.hpp"

#include <cstdint>
#include <vector>

namespace mfg {

enum class StartMode { density, uniform, point };

struct ParticleConfig {
    std::size_t n = 100000;
    std::size_t substeps = 4;  ///< simulation steps per grid time step
    std::uint64_t seed = 1;
    bool bridge = true;        ///< Brownian-bridge crossing correction at x = 0
    StartMode start = StartMode::density;
    double start_point = 1.0;  ///< StartMode::point
    std::size_t threads = 0;   ///< 0: hardware concurrency, capped by MFG_THREADS

    void validate() const;
};

/// Everything the simulator reads; fields are borrowed from a solve.
struct SimulationInput {
    Grid grid;
    double sigma = 0.5;
    double r = 0.0;
    const Field* policy = nullptr;   ///< production rate q >= 0 (required)
    const Field* revenue = nullptr;  ///< running payoff p q; null means 0
    Profile terminal;                ///< u_T; empty means 0
    Profile m0;                      ///< start density for StartMode::density
    const JumpOperator* jumps = nullptr;
};

struct SimulationResult {
    std::size_t n = 0;
    std::vector<double> histogram;  ///< (nt+1) x nodes densities, row-major
    std::vector<double> eta_hat;    ///< surviving fraction at every grid level
    std::vector<double> start;      ///< X_0 of each particle
    std::vector<double> payoff;     ///< discounted payoff of each particle
    std::size_t cols = 0;

    std::span<const double> density(std::size_t level) const;
};

SimulationResult simulate(const SimulationInput& in, const ParticleConfig& cfg);

struct BinScore {
    double x_lo = 0.0;
    double x_hi = 0.0;
    std::size_t count = 0;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    double pde_mean = 0.0;
    double z = 0.0;
    bool flagged = false;  ///< fewer than min_count starts: z not meaningful
};

/// Compares per-start-bin Monte Carlo payoffs with the mean of u(0, X_0) over the same starts.
std::vector<BinScore> value_check(const Grid& grid, const Field& u, const SimulationResult& sim,
                                  std::size_t bins, std::size_t min_count = 1000);

/// L1 distance int |hist - m| dx at one level.
double histogram_l1(const Grid& grid, const SimulationResult& sim, std::span<const double> m, std::size_t level);

/// Linear interpolation of a nodal profile at x in [0, x_max].
double interpolate(const Grid& grid, std::span<const double> f, double x);

/// Worker count: requested (or hardware) capped by the MFG_THREADS environment variable.
std::size_t thread_budget(std::size_t requested);

} // namespace mfg
