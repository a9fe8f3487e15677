#pragma once

#include "mfg/levy.hpp"
#include "mfg/market.hpp"
#include "support.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <random>
#include <utility>

namespace testing {

using mfg::DemandModel;
using mfg::Grid;
using mfg::JumpOperator;
using mfg::LevyMeasureSpec;
using mfg::Profile;

inline double bump(double x) { return std::exp(-std::pow(x - 6.0, 2)); }
inline double bump_dx(double x) { return -2.0 * (x - 6.0) * bump(x); }

// Compensated jump integral of the bump at x, by adaptive quadrature.
inline double exact_jump(const LevyMeasureSpec& s, double x) {
    boost::math::quadrature::tanh_sinh<double> q;
    auto g = [&](double z) {
        const double comp = std::fabs(z) <= 1.0 ? z * bump_dx(x) : 0.0;
        return (bump(x + z) - bump(x) - comp) * s.density(z);
    };
    double total = 0.0;
    const double cuts[] = {s.lo, -1.0, 0.0, 1.0, s.hi};
    for (int k = 0; k + 1 < 5; ++k) {
        const double a = std::max(cuts[k], s.lo), b = std::min(cuts[k + 1], s.hi);
        if (b > a) total += q.integrate(g, a, b);
    }
    return total;
}

// Discrete action including the small-jump diffusion the solvers add to sigma^2.
inline Profile full_action(const JumpOperator& L, const Profile& u) {
    Profile out = L.apply(u);
    const double dx = L.grid.dx;
    for (std::size_t i = 1; i < L.grid.last(); ++i) {
        out[i] += 0.5 * L.small_jump_variance * (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dx * dx);
    }
    return out;
}

inline Profile window_bump(const Grid& g, double c, double w) {
    return sample(g, [&](double x) {
        const double s = (x - c) / w;
        return std::fabs(s) < 1.0 ? std::pow(1.0 - s * s, 4) : 0.0;
    });
}

struct Instance {
    Profile phi;
    Profile m;
};

// Non-negative marginal values and a random sub-probability density.
inline Instance random_instance(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Instance in;
    const double level = 1.5 * u(rng);
    const double slope = u(rng);
    in.phi = sample(g, [&](double x) { return level * std::exp(-slope * x) + 0.1 * u(rng); });
    const double centre = 1.0 + 3.0 * u(rng);
    const double width = 0.3 + 0.7 * u(rng);
    in.m = bump_density(g, centre, width);
    const double mass = 0.2 + 0.8 * u(rng);
    for (double& v : in.m) v *= mass;
    return in;
}

// Counts sign changes of v - map(v) on a uniform scan and returns the scan root.
inline std::pair<int, double> scan_roots(const DemandModel& model, const Grid& g, double t, const Instance& in, double hi) {
    const int n = 4000;
    int changes = 0;
    double root = -1.0;
    double prev_v = 0.0;
    double prev_f = prev_v - mfg::clearing_map(model, g, t, in.phi, in.m, prev_v);
    if (prev_f == 0.0) root = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double v = hi * k / n;
        const double f = v - mfg::clearing_map(model, g, t, in.phi, in.m, v);
        if ((prev_f < 0.0 && f >= 0.0) || (prev_f > 0.0 && f <= 0.0)) {
            ++changes;
            // refine by bisection inside the scan cell
            double a = prev_v, b = v, fa = prev_f;
            for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
                const double c = 0.5 * (a + b);
                const double fc = c - mfg::clearing_map(model, g, t, in.phi, in.m, c);
                if ((fa < 0.0) == (fc < 0.0)) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                }
            }
            root = 0.5 * (a + b);
        }
        prev_v = v;
        prev_f = f;
    }
    return {changes, root};
}

/// Least-squares slope of -log2 err against the refinement index.
inline double fitted_order(const std::vector<double>& err) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < err.size(); ++k) {
        const double x = static_cast<double>(k);
        const double y = -std::log2(err[k]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double n = static_cast<double>(err.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Largest spatial L1 distance over the time levels.
inline double l1_sup(const Grid& g, const mfg::Field& a, const mfg::Field& b) {
    double worst = 0.0;
    Profile d(g.nodes());
    for (std::size_t n = 0; n < a.levels(); ++n) {
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::fabs(a.at(n, i) - b.at(n, i));
        worst = std::max(worst, mfg::integrate(g, d));
    }
    return worst;
}

} // namespace testing
