#include "doctest.h"

#include "mfg/error.hpp"
#include "mfg/fp.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace mfg;

namespace {

FpConfig config(const Grid& g, double sigma, double centre = 2.5, double width = 0.5) {
    FpConfig c;
    c.sigma = sigma;
    c.m0 = testing::bump_density(g, centre, width);
    return c;
}

double mean_position(const Grid& g, std::span<const double> m) {
    const Profile xm = testing::sample(g, [](double x) { return x; });
    return inner(g, xm, m) / integrate(g, m);
}

} // namespace

TEST_SUITE("fp") {

TEST_CASE("pure transport moves the bump along the characteristic") {
    const Grid g(6.0, 599, 1.0, 400);
    FpConfig cfg = config(g, 1e-3, 2.0, 0.2);
    const JumpOperator L = build_operator(g, LevyMeasureSpec::none());
    const Field q = testing::constant_field(g, Unit::dimensionless, 1.0);
    const FpSolution s = fp_solve(g, cfg, L, q, 1.0);
    CHECK(mean_position(g, s.m.row(0)) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::fabs(mean_position(g, s.m.row(g.nt)) - 1.0) <= 0.02);
    CHECK(s.eta[g.nt] == doctest::Approx(1.0).epsilon(1e-4));

    cfg.sign = DriftSign::verbatim;
    const FpSolution v = fp_solve(g, cfg, L, q, 1.0);
    CHECK(std::fabs(mean_position(g, v.m.row(g.nt)) - 3.0) <= 0.02);
}

TEST_CASE("mass lost equals the recorded fluxes") {
    const Grid g(6.0, 119, 1.0, 100);
    const FpConfig cfg = config(g, 0.5, 1.5, 0.6);
    const JumpOperator L = build_operator(g, LevyMeasureSpec::uniform(0.4, -1.5, 0.5));
    check_jump_cfl(g, L);
    Field q(g, Unit::dimensionless, false);
    for (std::size_t n = 0; n <= g.nt; ++n) {
        q.set_row(n, testing::sample(g, [&](double x) { return 0.5 + 0.3 * std::sin(x + g.t(n)); }));
    }
    const FpSolution s = fp_solve(g, cfg, L, q, 1.0);
    double drift = 0.0;
    for (std::size_t n = 0; n < g.nt; ++n) {
        const double lost = s.eta[n] - s.eta[n + 1];
        const double flux = g.dt * (s.left_flux[n] + s.right_flux[n] + s.jump_flux[n]);
        CHECK(std::fabs(lost - flux) <= 1e-12);
        drift += lost - flux;
    }
    CHECK(std::fabs(drift) <= 1e-8);
    CHECK(s.eta[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t n = 0; n < g.nt; ++n) CHECK(s.eta[n + 1] <= s.eta[n] + 1e-15);
}

TEST_CASE("positivity for random non-negative data") {
    const Grid g(6.0, 79, 1.0, 40);
    const JumpOperator L = build_operator(g, LevyMeasureSpec::truncated_normal(0.8, -0.5, 0.5, -2.0, 1.0));
    FpConfig cfg = config(g, 0.4);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Profile m(g.nodes()), q(g.nodes());
        for (std::size_t i = 1; i < g.last(); ++i) m[i] = u(rng) < 0.3 ? 0.0 : u(rng);
        for (double& v : q) v = 2.0 * u(rng);
        const FpStep s = fp_step(g, m, q, L, cfg);
        CHECK(*std::min_element(s.m.begin(), s.m.end()) >= 0.0);
        CHECK(s.m.front() == 0.0);
        CHECK(s.m.back() == 0.0);
        const Profile res = fp_residual(g, s.m, m, q, L, cfg);
        for (double v : res) CHECK(std::fabs(v) <= 1e-9);
    }
}

TEST_CASE("zero density stays zero") {
    const Grid g(6.0, 59, 1.0, 20);
    const JumpOperator L = build_operator(g, LevyMeasureSpec::uniform(0.2, -1.5, 0.5));
    const FpConfig cfg = config(g, 0.5);
    const FpStep s = fp_step(g, Profile(g.nodes(), 0.0), Profile(g.nodes(), 1.0), L, cfg);
    for (double v : s.m) CHECK(v == 0.0);
    const FpSolution z = fp_solve(g, cfg, L, testing::constant_field(g, Unit::dimensionless, 1.0), 0.0);
    CHECK(z.m.max() == 0.0);
    CHECK(z.m.min() == 0.0);
}

TEST_CASE("diffusion alone drains mass monotonically") {
    const Grid g(6.0, 119, 2.0, 100);
    const FpConfig cfg = config(g, 0.8, 1.0, 0.4);
    const JumpOperator L = build_operator(g, LevyMeasureSpec::none());
    const FpSolution s = fp_solve(g, cfg, L, testing::constant_field(g, Unit::dimensionless, 0.0), 1.0);
    for (std::size_t n = 0; n < g.nt; ++n) {
        CHECK(s.eta[n + 1] <= s.eta[n]);
        CHECK(s.boundary_flux[n] >= 0.0);
    }
    CHECK(s.m.min() >= -1e-12);
}

TEST_CASE("configuration contract") {
    const Grid g(6.0, 59, 1.0, 20);
    FpConfig cfg = config(g, 0.5);
    CHECK_NOTHROW(cfg.validate(g));
    cfg.m0[10] = -1e-3;
    CHECK_THROWS_WITH_AS(cfg.validate(g), doctest::Contains("node 10"), Error);
    cfg = config(g, 0.5);
    for (double& v : cfg.m0) v *= 1.01;
    CHECK_THROWS_WITH_AS(cfg.validate(g), doctest::Contains("integrate to 1"), Error);

    const Grid coarse(6.0, 59, 1.0, 2);
    const JumpOperator heavy = build_operator(coarse, LevyMeasureSpec::uniform(5.0, -1.5, 0.5));
    try {
        check_jump_cfl(coarse, heavy);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
    }
}

}
