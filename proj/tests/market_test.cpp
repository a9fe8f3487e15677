#include "doctest.h"

#include "mfg/error.hpp"
#include "mfg/market.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace mfg;
using testing::Instance;
using testing::random_instance;
using testing::scan_roots;

TEST_SUITE("market") {

TEST_CASE("exponential Bertrand clearing reproduces the explicit Hamiltonian") {
    const Grid g(6.0, 119, 1.0, 10);
    const DemandModel model = DemandModel::bertrand_exp(testing::linear_eps(0.2));
    std::mt19937_64 rng(1);
    const Instance in = random_instance(g, rng);
    const double t = 0.3;
    const ClearingResult r = clear_bertrand(model, g, t, in.phi, in.m);
    Profile p(g.nodes());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = in.phi[i] + 1.0;
    CHECK(r.value == doctest::Approx(inner(g, p, in.m)).epsilon(1e-13));
    const double eta = integrate(g, in.m);
    const double ux_m = inner(g, in.phi, in.m);
    for (std::size_t i = 0; i < g.nodes(); i += 7) {
        const double oracle = std::exp(model.c(t, eta) / eta * ux_m - in.phi[i]);
        CHECK(hamiltonian(model, t, in.phi[i], r.value, eta) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("power Bertrand iterates contract at rate beta") {
    const Grid g(6.0, 119, 1.0, 10);
    std::mt19937_64 rng(2);
    for (double eps0 : {0.05, 0.1, 0.3}) {
        const DemandModel model = DemandModel::bertrand_power(2.0, testing::linear_eps(eps0));
        const double beta = eps0 / (1.0 + eps0);
        for (int k = 0; k < 10; ++k) {
            const Instance in = random_instance(g, rng);
            const ClearingResult r = clear_bertrand(model, g, 0.0, in.phi, in.m);
            CHECK(r.bound_check);
            CHECK(r.value >= 0.0);
            CHECK(r.value <= r.bound);
            for (std::size_t j = 1; j < r.increments.size(); ++j) {
                if (r.increments[j - 1] < 1e-13) break;
                CHECK(r.increments[j] / r.increments[j - 1] <= beta + 1e-9);
            }
        }
    }
}

TEST_CASE("clearing roots are unique on random instances") {
    const Grid g(6.0, 79, 1.0, 10);
    std::mt19937_64 rng(4);
    const std::vector<DemandModel> models{DemandModel::bertrand_power(2.0, testing::linear_eps(0.1)),
                                          DemandModel::cournot_power(0.5, testing::linear_eps(0.1)),
                                          DemandModel::cournot_log(testing::linear_eps(0.1))};
    for (int k = 0; k < 50; ++k) {
        const DemandModel& model = models[static_cast<std::size_t>(k) % models.size()];
        const Instance in = random_instance(g, rng);
        const ClearingResult r = clear_market(model, g, 0.2, in.phi, in.m);
        CAPTURE(model.name());
        CHECK(r.bound_check);
        const auto [changes, root] = scan_roots(model, g, 0.2, in, 1.5 * r.bound);
        CHECK(changes == 1);
        CHECK(std::fabs(root - r.value) <= 1e-8);
    }
}

TEST_CASE("Cournot aggregate stays inside its bracket") {
    const Grid g(6.0, 79, 1.0, 10);
    std::mt19937_64 rng(6);
    for (double eps0 : {0.0, 0.1, 0.5}) {
        const DemandModel model = DemandModel::cournot_power(0.5, testing::linear_eps(eps0));
        for (int k = 0; k < 10; ++k) {
            const Instance in = random_instance(g, rng);
            const ClearingResult r = clear_cournot(model, g, 0.0, in.phi, in.m);
            const double min_phi = *std::min_element(in.phi.begin(), in.phi.end());
            CHECK(r.value >= 0.0);
            CHECK(r.value <= qstar(model, 0.0, min_phi, 0.0) * integrate(g, in.m) * (1.0 + 1e-12));
            CHECK(std::fabs(r.value - clearing_map(model, g, 0.0, in.phi, in.m, r.value)) <= 1e-10);
        }
    }
}

TEST_CASE("linear model clears in closed form") {
    EpsSchedule e;
    e.eps0 = 0.4;
    e.shape = EpsShape::constant;
    const DemandModel model = DemandModel::linear_quadratic(e);
    const Grid g(6.0, 79, 1.0, 10);
    std::mt19937_64 rng(8);
    const Instance in = random_instance(g, rng);
    const ClearingResult r = clear_market(model, g, 0.5, in.phi, in.m);
    CHECK(std::fabs(r.value - clearing_map(model, g, 0.5, in.phi, in.m, r.value)) <= 1e-13);
}

TEST_CASE("empty market and wrong variants") {
    const Grid g(6.0, 79, 1.0, 10);
    const Profile zero(g.nodes(), 0.0);
    const DemandModel b = DemandModel::bertrand_power(2.0, testing::linear_eps(0.1));
    const DemandModel c = DemandModel::cournot_log(testing::linear_eps(0.1));
    CHECK(clear_bertrand(b, g, 0.0, zero, zero).value == 0.0);
    CHECK(clear_cournot(c, g, 0.0, zero, zero).value == 0.0);
    CHECK_THROWS_AS(clear_bertrand(c, g, 0.0, zero, zero), Error);
    CHECK_THROWS_AS(clear_cournot(b, g, 0.0, zero, zero), Error);
    CHECK_THROWS_AS(clear_market(b, g, 0.0, Profile(3, 0.0), zero), Error);
    CHECK(clear_market(DemandModel::constant(1.0, 1.0), g, 0.0, zero, zero).value == 0.0);
}

}
