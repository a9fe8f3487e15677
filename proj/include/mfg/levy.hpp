#pragma once

#include "mfg/grid.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mfg {

enum class LevyKind { null, compound_poisson, singular };
enum class JumpFamily { uniform, truncated_normal, two_sided_exponential };

/// Declarative jump measure F(dz).
///
/// compound_poisson: intensity * (probability density of `family` restricted to
/// [lo, hi]). singular: scale * |z|^(-1-alpha) * exp(-theta |z|) on z != 0.
struct LevyMeasureSpec {
    LevyKind kind = LevyKind::null;

    JumpFamily family = JumpFamily::uniform;
    double intensity = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double mean = 0.0;    // truncated_normal
    double stddev = 1.0;  // truncated_normal
    double rate = 1.0;    // two_sided_exponential

    double scale = 0.0;
    double alpha = 0.5;
    double theta = 0.0;

    /// Small-jump cutoff r; unset means min(sqrt(dx), 0.5).
    std::optional<double> cutoff;

    static LevyMeasureSpec none();
    static LevyMeasureSpec uniform(double intensity, double lo, double hi);
    static LevyMeasureSpec truncated_normal(double intensity, double mean, double stddev, double lo,
                                            double hi);
    static LevyMeasureSpec two_sided_exponential(double intensity, double rate, double lo, double hi);
    static LevyMeasureSpec tempered_stable(double scale, double alpha, double theta);

    /// Density of F with respect to Lebesgue measure.
    double density(double z) const;
};

/// Integrals that decide whether a spec is an admissible jump measure.
struct MeasureIntegrals {
    double truncated_second_moment = 0.0;  ///< int min(z^2, 1) F(dz)
    double tail_half_moment = 0.0;         ///< int_{|z|>=1} |z|^{1/2} F(dz)
};

/// Throws ErrorKind::invalid_measure (divergent integrals) or
/// ErrorKind::parameter (malformed family parameters).
MeasureIntegrals validate(const LevyMeasureSpec& spec);

/// Integral of the density over [a, b], with a < b.
double measure_of(const LevyMeasureSpec& spec, double a, double b);

/// Row-compressed matrix where every row stores one contiguous column range.
class BandMatrix {
public:
    BandMatrix() = default;
    /// Builds from a dense row-major square matrix, trimming zero borders per row.
    static BandMatrix from_dense(std::size_t n, std::span<const double> dense);

    std::size_t size() const { return n_; }
    double at(std::size_t row, std::size_t col) const;
    /// y[row] for row in [row_begin, row_end); other entries of y untouched.
    void multiply(std::span<const double> x, std::span<double> y, std::size_t row_begin,
                  std::size_t row_end) const;
    std::vector<double> to_dense() const;
    std::size_t first(std::size_t row) const { return first_[row]; }
    std::span<const double> band(std::size_t row) const {
        return std::span<const double>(values_).subspan(offset_[row], offset_[row + 1] - offset_[row]);
    }
    BandMatrix transpose() const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> first_;
    std::vector<std::size_t> offset_;  // n_ + 1 entries
    std::vector<double> values_;
};

/// Snapped jump of `offset` grid cells with its binned masses.
struct JumpBin {
    long offset = 0;
    double compensated_mass = 0.0;  ///< mass of the bin inside r <= |z| <= 1
    double plain_mass = 0.0;        ///< mass of the bin inside |z| > 1
};

/// Discrete nonlocal operator for value functions, plus its exact transpose.
///
/// Jumps shorter than the cutoff are folded into an extra diffusion
/// (`small_jump_variance`, to be added to sigma^2 by the caller); the
/// compensated band r <= |z| <= 1 produces an upwinded drift `-drift * u_x`
/// that lives inside `matrix`.
struct JumpOperator {
    Grid grid;
    double cutoff = 0.0;
    double small_jump_variance = 0.0;
    double drift = 0.0;
    double total_mass = 0.0;
    std::vector<JumpBin> bins;
    /// Rate at which each node sends mass to x <= 0; zero rows kill nothing.
    Profile killing;
    BandMatrix matrix;
    BandMatrix adjoint;

    bool empty() const { return bins.empty() && drift == 0.0; }
    /// Evaluated as sum_j a_ij (u_j - u_i) - killing_i u_i, so constants are
    /// annihilated exactly on rows that kill nothing.
    Profile apply(std::span<const double> u) const;
    Profile apply_adjoint(std::span<const double> m) const;
    /// Largest total outflow rate -L[i][i] over all rows.
    double max_exit_rate() const;
};

JumpOperator build_operator(const Grid& grid, const LevyMeasureSpec& spec);

/// <L u, m> - <u, L_adj m> with trapezoidal inner products.
double adjoint_defect(const JumpOperator& op, std::span<const double> u, std::span<const double> m);

} // namespace mfg
