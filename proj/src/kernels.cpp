#include "mfg/kernels.hpp"

#include "mfg/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace mfg::kernels {

namespace {

Isa probe() {
    if (const char* env = std::getenv("MFG_SIMD")) {
        if (std::string(env) == "scalar") return Isa::scalar;
    }
    return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& selected() {
    static std::atomic<Isa> isa{probe()};
    return isa;
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) throw Error(ErrorKind::dimension, "kernel operands differ in length");
}

} // namespace

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(MFG_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
    selected().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    return active_isa() == Isa::avx2 ? avx2::dot(a.data(), b.data(), a.size())
                                     : scalar::dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) {
    return active_isa() == Isa::avx2 ? avx2::sum(a.data(), a.size()) : scalar::sum(a.data(), a.size());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    return active_isa() == Isa::avx2 ? avx2::max_abs_diff(a.data(), b.data(), a.size())
                                     : scalar::max_abs_diff(a.data(), b.data(), a.size());
}

void axpby(double alpha, std::span<const double> a, double beta, std::span<const double> b,
           std::span<double> out) {
    check_sizes(a.size(), b.size());
    check_sizes(a.size(), out.size());
    if (active_isa() == Isa::avx2) {
        avx2::axpby(alpha, a.data(), beta, b.data(), out.data(), a.size());
    } else {
        scalar::axpby(alpha, a.data(), beta, b.data(), out.data(), a.size());
    }
}

} // namespace mfg::kernels
