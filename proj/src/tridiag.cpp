#include "mfg/tridiag.hpp"

#include "mfg/error.hpp"

#include <cmath>
#include <vector>

namespace mfg {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<const double> rhs,
                       std::span<double> out) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n || out.size() != n) {
        throw Error(ErrorKind::dimension, "tridiagonal operands differ in length");
    }
    if (n == 0) return;
    std::vector<double> c(n);
    std::vector<double> d(n);
    double pivot = diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot)) throw Error(ErrorKind::internal, "zero pivot in tridiagonal solve");
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw Error(ErrorKind::internal, "zero pivot in tridiagonal solve");
        }
        c[i] = i + 1 < n ? upper[i] / pivot : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    out[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) out[i] = d[i] - c[i] * out[i + 1];
}

} // namespace mfg
