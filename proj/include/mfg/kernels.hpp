#pragma once

// Data-parallel inner loops shared by the solvers. Each kernel has a scalar
// reference implementation and an AVX2 variant; `active_isa()` reports which
// one the dispatcher picked at startup. Set MFG_SIMD=scalar to force the
// reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace mfg::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// ISA selected for this process (CPU probe, overridable through MFG_SIMD).
Isa active_isa();

/// Overrides dispatch; intended for tests that compare both paths.
void force_isa(Isa isa);

/// True when the AVX2 variant was compiled in and the CPU supports it.
bool avx2_available();

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
/// out = alpha * a + beta * b
void axpby(double alpha, std::span<const double> a, double beta, std::span<const double> b,
           std::span<double> out);

// Fixed implementations, exposed for equivalence testing.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void axpby(double alpha, const double* a, double beta, const double* b, double* out, std::size_t n);
} // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void axpby(double alpha, const double* a, double beta, const double* b, double* out, std::size_t n);
} // namespace avx2

} // namespace mfg::kernels
