#include "mfg/roots.hpp"

#include "mfg/error.hpp"

#include <cmath>
#include <limits>

namespace mfg {

RootResult safeguarded_newton(const std::function<double(double)>& f,
                              const std::function<double(double)>& df, double lo, double hi,
                              double ftol, std::size_t max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    RootResult res;
    if (std::fabs(flo) <= ftol) return {lo, std::fabs(flo), 0, true};
    if (std::fabs(fhi) <= ftol) return {hi, std::fabs(fhi), 0, true};
    if (flo * fhi > 0.0) {
        throw Error(ErrorKind::assumption_violation, "root is not bracketed");
    }
    // orient so that f(lo) < 0 < f(hi)
    if (flo > 0.0 || fhi < 0.0) {
        std::swap(lo, hi);
        std::swap(flo, fhi);
    }
    double x = 0.5 * (lo + hi);
    for (std::size_t it = 1; it <= max_iter; ++it) {
        const double fx = f(x);
        res = {x, std::fabs(fx), it, false};
        if (std::fabs(fx) <= ftol) {
            res.converged = true;
            return res;
        }
        if (fx < 0.0) lo = x;
        else hi = x;
        const double d = df(x);
        double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : std::nan("");
        const double a = std::fmin(lo, hi);
        const double b = std::fmax(lo, hi);
        if (!(next > a && next < b)) next = 0.5 * (lo + hi);
        if (next == x || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::fmax(1.0, std::fabs(x))) {
            // bracket collapsed to machine resolution
            res.x = next;
            res.residual = std::fabs(f(next));
            res.converged = true;
            return res;
        }
        x = next;
    }
    return res;
}

} // namespace mfg
