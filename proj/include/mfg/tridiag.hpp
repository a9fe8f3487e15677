#pragma once

#include <span>

namespace mfg {

/// Thomas algorithm for a tridiagonal system. `lower[0]` and `upper[n-1]` are
/// ignored. Throws ErrorKind::internal on a zero pivot.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<const double> rhs,
                       std::span<double> out);

} // namespace mfg
