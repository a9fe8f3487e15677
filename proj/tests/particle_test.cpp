#include "doctest.h"

#include "mfg/error.hpp"
#include "mfg/particle.hpp"
#include "support.hpp"

#include <cmath>
#include <cstdlib>

using namespace mfg;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace

TEST_SUITE("particle") {

TEST_CASE("survival of absorbed Brownian motion") {
    const Grid g(8.0, 79, 1.0, 20);
    const Field q = testing::constant_field(g, Unit::dimensionless, 0.0);
    SimulationInput in;
    in.grid = g;
    in.sigma = 1.0;
    in.policy = &q;
    ParticleConfig cfg;
    cfg.n = 100000;
    cfg.start = StartMode::point;
    cfg.start_point = 1.0;
    cfg.seed = 3;
    const SimulationResult r = simulate(in, cfg);
    for (std::size_t n : {5ul, 10ul, 20ul}) {
        const double t = g.t(n);
        const double p = 2.0 * normal_cdf(1.0 / std::sqrt(t)) - 1.0;
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.n));
        INFO("t = " << t << " eta_hat = " << r.eta_hat[n] << " exact = " << p);
        CHECK(std::fabs(r.eta_hat[n] - p) <= 3.0 * se);
    }
}

TEST_CASE("deterministic depletion hits zero on schedule") {
    const Grid g(6.0, 59, 4.0, 64);
    const Field q = testing::constant_field(g, Unit::dimensionless, 1.0);
    const Field rev = testing::constant_field(g, Unit::currency, 1.0);
    SimulationInput in;
    in.grid = g;
    in.sigma = 0.0;
    in.policy = &q;
    in.revenue = &rev;
    in.terminal.assign(g.nodes(), 5.0);
    ParticleConfig cfg;
    cfg.n = 1;
    cfg.start = StartMode::point;
    cfg.start_point = 2.0;
    const SimulationResult r = simulate(in, cfg);
    CHECK(r.eta_hat[31] == 1.0);
    CHECK(r.eta_hat[32] == 0.0);
    CHECK(r.payoff[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("results depend on the seed only") {
    const Problem p = testing::small_problem(DemandModel::bertrand_exp(testing::linear_eps(0.0)),
                                             LevyMeasureSpec::uniform(0.3, -1.0, 0.5));
    const EquilibriumSolution s = solve_mfg(p, CouplerConfig{});
    SimulationInput in;
    in.grid = p.grid;
    in.sigma = p.fp.sigma;
    in.policy = &s.drift;
    in.m0 = p.fp.m0;
    in.jumps = &p.jumps;
    ParticleConfig cfg;
    cfg.n = 20000;
    cfg.threads = 1;
    const SimulationResult a = simulate(in, cfg);
    cfg.threads = 4;
    const SimulationResult b = simulate(in, cfg);
    CHECK(a.payoff == b.payoff);
    CHECK(a.histogram == b.histogram);
    CHECK(a.start == b.start);
    cfg.seed = 2;
    const SimulationResult c = simulate(in, cfg);
    CHECK(c.start != a.start);
}

TEST_CASE("equilibrium policy reproduces the PDE density and value") {
    const Problem p = testing::small_problem(DemandModel::bertrand_exp(testing::linear_eps(0.0)), LevyMeasureSpec::none(),
                                             119, 100);
    const EquilibriumSolution s = solve_mfg(p, CouplerConfig{});
    REQUIRE(s.converged);
    const PolicyFields pol = derive_policy(p, s.u, s.aggregate, s.eta, 1.0);
    SimulationInput in;
    in.grid = p.grid;
    in.sigma = p.fp.sigma;
    in.r = p.hjb.r;
    in.policy = &pol.production;
    in.revenue = &pol.revenue;
    in.terminal = p.hjb.terminal;
    in.m0 = p.fp.m0;
    ParticleConfig cfg;
    cfg.n = 100000;
    const SimulationResult r = simulate(in, cfg);
    for (std::size_t n : {p.grid.nt / 2, p.grid.nt}) {
        CHECK(histogram_l1(p.grid, r, s.m.row(n), n) <= 0.05);
    }
    CHECK(std::fabs(r.eta_hat[p.grid.nt] - s.eta[p.grid.nt]) <= 0.01);

    std::size_t scored = 0;
    for (const BinScore& b : value_check(p.grid, s.u, r, 12)) {
        if (b.flagged) continue;
        ++scored;
        INFO("bin [" << b.x_lo << ", " << b.x_hi << ") z = " << b.z);
        CHECK(std::fabs(b.z) <= 3.0);
    }
    CHECK(scored >= 4);
}

TEST_CASE("zero policy pays nothing") {
    const Grid g(6.0, 59, 1.0, 20);
    const Field q = testing::constant_field(g, Unit::dimensionless, 0.0);
    SimulationInput in;
    in.grid = g;
    in.policy = &q;
    in.m0 = testing::bump_density(g, 3.0, 0.5);
    ParticleConfig cfg;
    cfg.n = 5000;
    const SimulationResult r = simulate(in, cfg);
    for (double v : r.payoff) CHECK(v == 0.0);
    const Field u(g, Unit::currency, true);
    for (const BinScore& b : value_check(g, u, r, 6, 1)) CHECK(b.z == 0.0);
}

TEST_CASE("helpers and contracts") {
    const Grid g(6.0, 59, 1.0, 20);
    const Profile f = testing::sample(g, [](double x) { return 2.0 * x + 1.0; });
    CHECK(interpolate(g, f, 1.234) == doctest::Approx(3.468).epsilon(1e-12));
    CHECK(interpolate(g, f, -1.0) == f.front());
    CHECK(interpolate(g, f, 7.0) == f.back());
    CHECK(thread_budget(3) >= 1);
    CHECK(thread_budget(3) <= 3);

    SimulationInput in;
    in.grid = g;
    CHECK_THROWS_AS(simulate(in, ParticleConfig{}), Error);
    ParticleConfig bad;
    bad.n = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

}
