#pragma once

#include "mfg/demand.hpp"
#include "mfg/grid.hpp"

#include <span>
#include <vector>

namespace mfg {

struct ClearingResult {
    double value = 0.0;  ///< pi (Bertrand) or Q (Cournot)
    std::size_t iterations = 0;
    double final_residual = 0.0;
    bool bound_check = true;
    double bound = 0.0;
    /// |pi_{k+1} - pi_k| for the price iteration; Newton step sizes for Q.
    std::vector<double> increments;
};

struct ClearingOptions {
    double tol = 1e-10;
    std::size_t price_cap = 200;
    std::size_t quantity_cap = 100;
};

/// Aggregate price pi = int p*(eta; phi, pi) m dx by fixed-point iteration from 0.
ClearingResult clear_bertrand(const DemandModel& model, const Grid& grid, double t,
                              std::span<const double> phi, std::span<const double> m,
                              const ClearingOptions& opts = {});

/// Aggregate quantity Q = int q*(phi, Q) m dx by safeguarded Newton on
/// [0, q*(min phi, 0) |m|_1].
ClearingResult clear_cournot(const DemandModel& model, const Grid& grid, double t,
                             std::span<const double> phi, std::span<const double> m,
                             const ClearingOptions& opts = {});

/// Dispatches on the model's aggregate; Variant::constant clears to 0.
ClearingResult clear_market(const DemandModel& model, const Grid& grid, double t,
                            std::span<const double> phi, std::span<const double> m,
                            const ClearingOptions& opts = {});

/// Right-hand side of the clearing equation at a trial aggregate value.
double clearing_map(const DemandModel& model, const Grid& grid, double t, std::span<const double> phi,
                    std::span<const double> m, double value);

} // namespace mfg
