#pragma once

#include <cstddef>
#include <functional>

namespace mfg {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Newton's method kept inside a sign-changing bracket [lo, hi]; a step that
/// leaves the bracket or fails to shrink it is replaced by bisection.
/// Requires f(lo) and f(hi) of opposite sign (or zero).
RootResult safeguarded_newton(const std::function<double(double)>& f,
                              const std::function<double(double)>& df, double lo, double hi,
                              double ftol, std::size_t max_iter);

} // namespace mfg
