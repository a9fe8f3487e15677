#include "doctest.h"

#include "mfg/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace mfg;

TEST_SUITE("kernels") {

TEST_CASE("avx2 variants agree with the scalar reference") {
    if (!kernels::avx2_available()) {
        MESSAGE("AVX2 not available on this CPU; equivalence not exercised");
        return;
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 31u, 33u, 201u, 1000u, 4099u}) {
        CAPTURE(n);
        std::vector<double> a(n), b(n), s(n), v(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
        }
        const double scale = static_cast<double>(n) + 1.0;
        CHECK(std::fabs(kernels::scalar::dot(a.data(), b.data(), n) - kernels::avx2::dot(a.data(), b.data(), n)) <=
              1e-13 * scale);
        CHECK(std::fabs(kernels::scalar::sum(a.data(), n) - kernels::avx2::sum(a.data(), n)) <= 1e-13 * scale);
        CHECK(kernels::scalar::max_abs_diff(a.data(), b.data(), n) ==
              kernels::avx2::max_abs_diff(a.data(), b.data(), n));
        kernels::scalar::axpby(0.3, a.data(), -1.7, b.data(), s.data(), n);
        kernels::avx2::axpby(0.3, a.data(), -1.7, b.data(), v.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(s[i] - v[i]) <= 1e-15 * (std::fabs(s[i]) + 1.0));
    }
}

TEST_CASE("dispatch can be forced to either path") {
    std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> b{5.0, 4.0, 3.0, 2.0, 1.0};
    const kernels::Isa before = kernels::active_isa();
    kernels::force_isa(kernels::Isa::scalar);
    CHECK(kernels::active_isa() == kernels::Isa::scalar);
    CHECK(kernels::dot(a, b) == 35.0);
    CHECK(kernels::sum(a) == 15.0);
    CHECK(kernels::max_abs_diff(a, b) == 4.0);
    if (kernels::avx2_available()) {
        kernels::force_isa(kernels::Isa::avx2);
        CHECK(kernels::dot(a, b) == 35.0);
        CHECK(kernels::sum(a) == 15.0);
    }
    kernels::force_isa(before);
    CHECK(kernels::to_string(kernels::Isa::scalar) == "scalar");
}

TEST_CASE("axpby through the dispatcher") {
    std::vector<double> a(9, 1.0), b(9, 2.0), out(9);
    kernels::axpby(2.0, a, 0.5, b, out);
    for (double v : out) CHECK(v == 3.0);
}

}
