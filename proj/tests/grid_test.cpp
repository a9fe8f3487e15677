#include "doctest.h"

#include "mfg/error.hpp"
#include "mfg/grid.hpp"
#include "mfg/roots.hpp"
#include "mfg/tridiag.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace mfg;

TEST_SUITE("grid_field") {

TEST_CASE("lattice geometry") {
    const Grid g(6.0, 199, 1.0, 100);
    CHECK(g.dx == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(g.dt == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(g.nodes() == 201);
    CHECK(g.x(0) == 0.0);
    CHECK(g.x(g.last()) == 6.0);
    CHECK(g.t(g.nt) == 1.0);
    CHECK_THROWS_AS(Grid(6.0, 1, 1.0, 10), Error);
    CHECK_THROWS_AS(Grid(0.0, 10, 1.0, 10), Error);
    CHECK_THROWS_AS(Grid(1.0, 10, 1.0, 0), Error);
}

TEST_CASE("central gradient annihilates constants and is exact on affine and quadratic profiles") {
    const Grid g(2.0, 19, 1.0, 1);  // dx = 0.1
    const Profile c(g.nodes(), 3.5);
    const Profile gc = gradient(g, c, Difference::central);
    for (std::size_t i = 1; i < g.last(); ++i) CHECK(gc[i] == 0.0);

    const Profile lin = testing::sample(g, [](double x) { return x; });
    const Profile gl = gradient(g, lin, Difference::central);
    for (std::size_t i = 1; i < g.last(); ++i) CHECK(gl[i] == doctest::Approx(1.0).epsilon(1e-12));

    // (1.1^2 - 0.9^2) / 0.2 = 2
    const Profile sq = testing::sample(g, [](double x) { return x * x; });
    const Profile gs = gradient(g, sq, Difference::central);
    CHECK(std::fabs(gs[10] - 2.0) <= 1e-12);
}

TEST_CASE("upwind gradient follows the drift sign and the ghost rule") {
    const Grid g(1.0, 3, 1.0, 1);  // dx = 0.25, nodes 0..4
    const Profile f{0.0, 1.0, 4.0, 9.0, 16.0};
    const Profile up = gradient(g, f, Difference::upwind, Profile(5, 1.0));
    const Profile down = gradient(g, f, Difference::upwind, Profile(5, -1.0));
    CHECK(up[1] == doctest::Approx(12.0));
    CHECK(down[1] == doctest::Approx(4.0));
    CHECK(up[4] == 0.0);  // constant ghost past x_max
    const Profile z = gradient(g, f, Difference::upwind, Profile(5, 1.0), Ghost::zero);
    CHECK(z[4] == doctest::Approx(-64.0));
    CHECK_THROWS_AS(gradient(g, Profile(4, 0.0), Difference::central), Error);
}

TEST_CASE("backward gradient") {
    const Grid g(1.0, 3, 1.0, 1);
    const Profile b = backward_gradient(g, Profile{0.0, 1.0, 4.0, 9.0, 16.0});
    CHECK(b[0] == 0.0);
    CHECK(b[2] == doctest::Approx(12.0));
}

TEST_CASE("trapezoid quadrature") {
    const Grid g(2.0, 19, 1.0, 1);
    CHECK(integrate(g, Profile(g.nodes(), 0.0)) == 0.0);
    CHECK(integrate(g, Profile(g.nodes(), 1.0)) == doctest::Approx(2.0).epsilon(1e-14));
    // hat of height 1 on [0.5, 1.5] has area 0.5
    const Profile hat = testing::sample(g, [](double x) { return std::max(0.0, 1.0 - std::fabs(x - 1.0) / 0.5); });
    CHECK(std::fabs(integrate(g, hat) - 0.5) <= 1e-12);
}

TEST_CASE("quadrature is linear") {
    const Grid g(5.0, 123, 1.0, 1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Profile f(g.nodes()), h(g.nodes()), c(g.nodes());
        const double a = u(rng), b = u(rng);
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] = u(rng);
            h[i] = u(rng);
            c[i] = a * f[i] + b * h[i];
        }
        const double lhs = integrate(g, c);
        const double rhs = a * integrate(g, f) + b * integrate(g, h);
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
        CHECK(inner(g, f, h) == doctest::Approx(inner(g, h, f)).epsilon(1e-14));
    }
}

TEST_CASE("dirichlet fields keep column 0 at zero") {
    const Grid g(1.0, 4, 1.0, 3);
    Field f(g, Unit::currency, true);
    for (std::size_t n = 0; n <= g.nt; ++n) f.set_row(n, Profile(g.nodes(), 2.0));
    for (std::size_t n = 0; n <= g.nt; ++n) {
        CHECK(f.at(n, 0) == 0.0);
        CHECK(f.at(n, 1) == 2.0);
    }
    CHECK_THROWS_AS(f.set_row(0, Profile(3, 0.0)), Error);
    CHECK_THROWS_AS(f.set_row(9, Profile(g.nodes(), 0.0)), Error);
    Field free(g, Unit::density, false);
    free.set_row(1, Profile(g.nodes(), 2.0));
    CHECK(free.at(1, 0) == 2.0);
}

TEST_CASE("tridiagonal solve matches a dense oracle") {
    const std::vector<double> lo{0.0, -1.0, -1.0, -1.0}, di{4.0, 4.0, 4.0, 4.0}, up{-1.0, -1.0, -1.0, 0.0};
    const std::vector<double> x{1.0, -2.0, 0.5, 3.0};
    std::vector<double> rhs(4), out(4);
    for (std::size_t i = 0; i < 4; ++i) {
        rhs[i] = di[i] * x[i] + (i > 0 ? lo[i] * x[i - 1] : 0.0) + (i + 1 < 4 ? up[i] * x[i + 1] : 0.0);
    }
    solve_tridiagonal(lo, di, up, rhs, out);
    for (std::size_t i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(x[i]).epsilon(1e-14));
    CHECK_THROWS_AS(solve_tridiagonal(lo, std::vector<double>{0.0, 1.0, 1.0, 1.0}, up, rhs, out), Error);
}

TEST_CASE("safeguarded newton stays inside its bracket") {
    // sqrt(2) with a deliberately bad derivative
    const RootResult r = safeguarded_newton([](double x) { return x * x - 2.0; }, [](double) { return 1e-3; }, 0.0,
                                            2.0, 1e-14, 200);
    CHECK(r.converged);
    CHECK(r.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

}
