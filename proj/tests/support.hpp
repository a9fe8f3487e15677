#pragma once

#include "mfg/coupler.hpp"
#include "mfg/grid.hpp"
#include "mfg/levy.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <span>

namespace testing {

inline mfg::Profile sample(const mfg::Grid& g, double (*f)(double)) {
    mfg::Profile out(g.nodes());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(g.x(i));
    return out;
}

template <class F>
mfg::Profile sample(const mfg::Grid& g, F f) {
    mfg::Profile out(g.nodes());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(g.x(i));
    return out;
}

/// Gaussian bump on the interior nodes, zero at both ends, unit trapezoid mass.
inline mfg::Profile bump_density(const mfg::Grid& g, double centre, double width) {
    mfg::Profile m = sample(g, [&](double x) { return std::exp(-0.5 * std::pow((x - centre) / width, 2)); });
    m.front() = 0.0;
    m.back() = 0.0;
    const double mass = mfg::integrate(g, m);
    for (double& v : m) v /= mass;
    return m;
}

/// Saturating terminal reward kappa (1 - exp(-x / ell)).
inline mfg::Profile saturating(const mfg::Grid& g, double kappa, double ell) {
    return sample(g, [&](double x) { return kappa * (1.0 - std::exp(-x / ell)); });
}

inline mfg::Field constant_field(const mfg::Grid& g, mfg::Unit unit, double value) {
    mfg::Field f(g, unit, false);
    mfg::Profile row(g.nodes(), value);
    for (std::size_t n = 0; n <= g.nt; ++n) f.set_row(n, row);
    return f;
}

/// Small Bertrand-exp problem used by the coupled tests.
inline mfg::Problem small_problem(mfg::DemandModel model, mfg::LevyMeasureSpec jumps = mfg::LevyMeasureSpec::none(),
                                  std::size_t nx = 59, std::size_t nt = 40) {
    mfg::Problem p;
    p.grid = mfg::Grid(6.0, nx, 1.0, nt);
    p.model = model;
    p.hjb.sigma = 0.5;
    p.hjb.r = 0.05;
    p.hjb.terminal = saturating(p.grid, 3.69, 1.85);
    p.fp.sigma = 0.5;
    p.fp.m0 = bump_density(p.grid, 2.5, 0.5);
    p.jumps = mfg::build_operator(p.grid, jumps);
    return p;
}

inline mfg::EpsSchedule linear_eps(double eps0, double horizon = 1.0) {
    mfg::EpsSchedule e;
    e.eps0 = eps0;
    e.shape = mfg::EpsShape::linear_to_zero;
    e.horizon = horizon;
    return e;
}

inline std::filesystem::path config_dir() { return std::filesystem::path(MFG_CONFIG_DIR); }

inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mfg_tests_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline double sup_diff(std::span<const double> a, std::span<const double> b) {
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::fabs(a[i] - b[i]));
    return out;
}

} // namespace testing
