#include "mfg/levy.hpp"

#include "mfg/error.hpp"
#include "mfg/kernels.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mfg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Quadrature of g over [a, b] where g may have an integrable endpoint
// singularity; b may be +inf.
template <class G>
double quad(G g, double a, double b) {
    if (!(b > a)) return 0.0;
    // 0 * inf at an endpoint or far out in the tail: the integrand tends to 0 there.
    auto safe = [&](double z) {
        const double v = g(z);
        return std::isfinite(v) ? v : 0.0;
    };
    if (std::isinf(b)) {
        boost::math::quadrature::exp_sinh<double> integrator;
        return integrator.integrate([&](double z) { return safe(a + z); }, 0.0, kInf);
    }
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(safe, a, b);
}

// Points where the density (or its derivative) is not smooth.
std::vector<double> breakpoints(const LevyMeasureSpec& spec) {
    std::vector<double> pts{0.0, -1.0, 1.0};
    if (spec.kind == LevyKind::compound_poisson) {
        pts.push_back(spec.lo);
        pts.push_back(spec.hi);
    }
    return pts;
}

// Integral of weight(z) * density(z) over [a, b], split at breakpoints.
template <class W>
double weighted_measure(const LevyMeasureSpec& spec, double a, double b, W weight) {
    if (spec.kind == LevyKind::null || !(b > a)) return 0.0;
    if (spec.kind == LevyKind::compound_poisson) {
        a = std::max(a, spec.lo);
        b = std::min(b, spec.hi);
        if (!(b > a)) return 0.0;
    }
    std::vector<double> cuts{a};
    for (double p : breakpoints(spec)) {
        if (p > a && p < b) cuts.push_back(p);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(b);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        total += quad([&](double z) { return weight(z) * spec.density(z); }, cuts[k], cuts[k + 1]);
    }
    return total;
}

void check_family(const LevyMeasureSpec& spec) {
    if (!(spec.intensity >= 0.0) || !std::isfinite(spec.intensity)) {
        throw Error(ErrorKind::parameter, "jump intensity must be a finite non-negative number");
    }
    if (!(spec.hi > spec.lo)) throw Error(ErrorKind::parameter, "jump support needs lo < hi");
    if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi)) {
        throw Error(ErrorKind::parameter, "compound Poisson support must be bounded");
    }
    if (spec.family == JumpFamily::truncated_normal && !(spec.stddev > 0.0)) {
        throw Error(ErrorKind::parameter, "truncated normal needs stddev > 0");
    }
    if (spec.family == JumpFamily::two_sided_exponential && !(spec.rate > 0.0)) {
        throw Error(ErrorKind::parameter, "two-sided exponential needs rate > 0");
    }
}

double family_normaliser(const LevyMeasureSpec& spec) {
    switch (spec.family) {
        case JumpFamily::uniform: return spec.hi - spec.lo;
        case JumpFamily::truncated_normal:
            return spec.stddev * std::sqrt(2.0 * std::numbers::pi) *
                   (normal_cdf((spec.hi - spec.mean) / spec.stddev) -
                    normal_cdf((spec.lo - spec.mean) / spec.stddev));
        case JumpFamily::two_sided_exponential: {
            // int_lo^hi (rate/2) exp(-rate |z|) dz
            auto cdf = [&](double z) {
                return z < 0.0 ? 0.5 * std::exp(spec.rate * z) : 1.0 - 0.5 * std::exp(-spec.rate * z);
            };
            return (cdf(spec.hi) - cdf(spec.lo)) * 2.0 / spec.rate;
        }
    }
    return 1.0;
}

} // namespace

LevyMeasureSpec LevyMeasureSpec::none() { return {}; }

LevyMeasureSpec LevyMeasureSpec::uniform(double intensity, double lo, double hi) {
    LevyMeasureSpec s;
    s.kind = LevyKind::compound_poisson;
    s.family = JumpFamily::uniform;
    s.intensity = intensity;
    s.lo = lo;
    s.hi = hi;
    return s;
}

LevyMeasureSpec LevyMeasureSpec::truncated_normal(double intensity, double mean, double stddev,
                                                  double lo, double hi) {
    LevyMeasureSpec s = uniform(intensity, lo, hi);
    s.family = JumpFamily::truncated_normal;
    s.mean = mean;
    s.stddev = stddev;
    return s;
}

LevyMeasureSpec LevyMeasureSpec::two_sided_exponential(double intensity, double rate, double lo,
                                                       double hi) {
    LevyMeasureSpec s = uniform(intensity, lo, hi);
    s.family = JumpFamily::two_sided_exponential;
    s.rate = rate;
    return s;
}

LevyMeasureSpec LevyMeasureSpec::tempered_stable(double scale, double alpha, double theta) {
    LevyMeasureSpec s;
    s.kind = LevyKind::singular;
    s.scale = scale;
    s.alpha = alpha;
    s.theta = theta;
    return s;
}

double LevyMeasureSpec::density(double z) const {
    switch (kind) {
        case LevyKind::null: return 0.0;
        case LevyKind::compound_poisson: {
            if (z < lo || z > hi || intensity == 0.0) return 0.0;
            double shape = 1.0;
            if (family == JumpFamily::truncated_normal) {
                const double s = (z - mean) / stddev;
                shape = std::exp(-0.5 * s * s);
            } else if (family == JumpFamily::two_sided_exponential) {
                shape = std::exp(-rate * std::fabs(z));
            }
            return intensity * shape / family_normaliser(*this);
        }
        case LevyKind::singular: {
            const double a = std::fabs(z);
            if (a == 0.0) return kInf;
            return scale * std::pow(a, -1.0 - alpha) * std::exp(-theta * a);
        }
    }
    return 0.0;
}

double measure_of(const LevyMeasureSpec& spec, double a, double b) {
    if (spec.kind == LevyKind::compound_poisson && spec.family != JumpFamily::truncated_normal) {
        return weighted_measure(spec, a, b, [](double) { return 1.0; });
    }
    if (spec.kind == LevyKind::compound_poisson) {
        a = std::max(a, spec.lo);
        b = std::min(b, spec.hi);
        if (!(b > a)) return 0.0;
        const double mass = normal_cdf((b - spec.mean) / spec.stddev) - normal_cdf((a - spec.mean) / spec.stddev);
        const double total = normal_cdf((spec.hi - spec.mean) / spec.stddev) -
                             normal_cdf((spec.lo - spec.mean) / spec.stddev);
        return spec.intensity * mass / total;
    }
    if (spec.kind == LevyKind::singular && a < 0.0 && b > 0.0) return kInf;
    return weighted_measure(spec, a, b, [](double) { return 1.0; });
}

MeasureIntegrals validate(const LevyMeasureSpec& spec) {
    if (spec.cutoff && !(*spec.cutoff > 0.0 && *spec.cutoff < 1.0)) {
        throw Error(ErrorKind::parameter, "small-jump cutoff must lie in (0, 1)");
    }
    MeasureIntegrals out;
    switch (spec.kind) {
        case LevyKind::null: return out;
        case LevyKind::compound_poisson: check_family(spec); break;
        case LevyKind::singular:
            if (!(spec.scale >= 0.0) || !std::isfinite(spec.scale)) {
                throw Error(ErrorKind::parameter, "singular measure scale must be finite and >= 0");
            }
            if (!(spec.theta >= 0.0)) throw Error(ErrorKind::parameter, "tempering rate must be >= 0");
            if (!(spec.alpha > 0.0)) throw Error(ErrorKind::parameter, "stability index must be positive");
            if (spec.alpha >= 2.0) {
                throw Error(ErrorKind::invalid_measure,
                            "int min(z^2,1) F(dz) diverges for stability index >= 2");
            }
            if (spec.theta == 0.0 && spec.alpha <= 0.5) {
                throw Error(ErrorKind::invalid_measure,
                            "int_{|z|>=1} |z|^{1/2} F(dz) diverges for untempered index <= 1/2");
            }
            break;
    }
    auto sq = [](double z) { return std::min(z * z, 1.0); };
    auto half = [](double z) { return std::sqrt(std::fabs(z)); };
    if (spec.kind == LevyKind::compound_poisson) {
        out.truncated_second_moment = weighted_measure(spec, spec.lo, spec.hi, sq);
        out.tail_half_moment = weighted_measure(spec, spec.lo, -1.0, half) +
                               weighted_measure(spec, 1.0, spec.hi, half);
    } else {
        // symmetric density: double the positive half-line
        out.truncated_second_moment = 2.0 * (weighted_measure(spec, 0.0, 1.0, sq) +
                                             weighted_measure(spec, 1.0, kInf, sq));
        out.tail_half_moment = 2.0 * weighted_measure(spec, 1.0, kInf, half);
    }
    if (!std::isfinite(out.truncated_second_moment) || !std::isfinite(out.tail_half_moment)) {
        throw Error(ErrorKind::invalid_measure, "jump measure integrals are not finite");
    }
    return out;
}

// ---------------------------------------------------------------------------

BandMatrix BandMatrix::from_dense(std::size_t n, std::span<const double> dense) {
    if (dense.size() != n * n) throw Error(ErrorKind::dimension, "dense matrix is not n x n");
    BandMatrix m;
    m.n_ = n;
    m.first_.resize(n);
    m.offset_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = dense.data() + i * n;
        std::size_t lo = n;
        std::size_t hi = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] != 0.0) {
                lo = std::min(lo, j);
                hi = j + 1;
            }
        }
        if (lo >= hi) {
            lo = i;
            hi = i;
        }
        m.first_[i] = lo;
        m.values_.insert(m.values_.end(), row + lo, row + hi);
        m.offset_[i + 1] = m.values_.size();
    }
    return m;
}

double BandMatrix::at(std::size_t row, std::size_t col) const {
    const std::size_t len = offset_[row + 1] - offset_[row];
    if (col < first_[row] || col >= first_[row] + len) return 0.0;
    return values_[offset_[row] + (col - first_[row])];
}

void BandMatrix::multiply(std::span<const double> x, std::span<double> y, std::size_t row_begin,
                          std::size_t row_end) const {
    if (x.size() != n_ || y.size() != n_) throw Error(ErrorKind::dimension, "band matvec size mismatch");
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const std::size_t len = offset_[i + 1] - offset_[i];
        y[i] = kernels::dot(std::span<const double>(values_).subspan(offset_[i], len),
                            x.subspan(first_[i], len));
    }
}

std::vector<double> BandMatrix::to_dense() const {
    std::vector<double> d(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = offset_[i]; k < offset_[i + 1]; ++k) {
            d[i * n_ + first_[i] + (k - offset_[i])] = values_[k];
        }
    }
    return d;
}

BandMatrix BandMatrix::transpose() const {
    const std::vector<double> d = to_dense();
    std::vector<double> t(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) t[j * n_ + i] = d[i * n_ + j];
    }
    return from_dense(n_, t);
}

// ---------------------------------------------------------------------------

Profile JumpOperator::apply(std::span<const double> u) const {
    check_profile(grid, u, "jump operator input");
    Profile out(grid.nodes(), 0.0);
    if (matrix.size() != grid.nodes()) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::size_t j0 = matrix.first(i);
        const auto a = matrix.band(i);
        double acc = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (j0 + k != i) acc += a[k] * (u[j0 + k] - u[i]);
        }
        out[i] = acc - killing[i] * u[i];
    }
    return out;
}

Profile JumpOperator::apply_adjoint(std::span<const double> m) const {
    check_profile(grid, m, "adjoint jump operator input");
    Profile out(grid.nodes(), 0.0);
    if (adjoint.size() == grid.nodes()) adjoint.multiply(m, out, 0, grid.nodes());
    return out;
}

double JumpOperator::max_exit_rate() const {
    double rate = 0.0;
    for (std::size_t i = 0; i < matrix.size(); ++i) rate = std::max(rate, -matrix.at(i, i));
    return rate;
}

JumpOperator build_operator(const Grid& grid, const LevyMeasureSpec& spec) {
    validate(spec);
    JumpOperator op;
    op.grid = grid;
    const std::size_t n = grid.nodes();
    const double dx = grid.dx;
    const double requested = spec.cutoff.value_or(std::min(std::sqrt(dx), 0.5));
    // jumps shorter than half a cell would snap onto the origin; they join the
    // small-jump diffusion instead
    const double r = std::max(requested, 0.5 * dx);
    op.cutoff = r;
    if (spec.kind == LevyKind::null) {
        op.matrix = BandMatrix::from_dense(n, std::vector<double>(n * n, 0.0));
        op.adjoint = op.matrix;
        op.killing.assign(n, 0.0);
        return op;
    }

    auto second = [](double z) { return z * z; };
    op.small_jump_variance = weighted_measure(spec, -r, 0.0, second) + weighted_measure(spec, 0.0, r, second);

    // any jump of at least (nx + 1.5) cells leaves the domain from every node
    const long lump = static_cast<long>(grid.nx) + 2;
    long kmax = lump;
    if (spec.kind == LevyKind::compound_poisson) {
        const double reach = std::max(std::fabs(spec.lo), std::fabs(spec.hi));
        kmax = std::min(kmax, static_cast<long>(std::ceil(reach / dx + 0.5)));
    }

    for (long k = -kmax; k <= kmax; ++k) {
        if (k == 0) continue;
        const long mag = std::labs(k);
        double a = (static_cast<double>(mag) - 0.5) * dx;
        double b = mag == lump ? kInf : (static_cast<double>(mag) + 0.5) * dx;
        a = std::max(a, r);
        if (!(b > a)) continue;
        JumpBin bin;
        bin.offset = k;
        auto mass = [&](double lo, double hi) {
            if (!(hi > lo)) return 0.0;
            return k > 0 ? measure_of(spec, lo, hi) : measure_of(spec, -hi, -lo);
        };
        bin.compensated_mass = mass(a, std::min(b, 1.0));
        bin.plain_mass = mass(std::max(a, 1.0), b);
        if (bin.compensated_mass + bin.plain_mass > 0.0) op.bins.push_back(bin);
    }

    std::vector<double> dense(n * n, 0.0);
    op.killing.assign(n, 0.0);
    const long last = static_cast<long>(grid.last());
    for (const JumpBin& bin : op.bins) {
        const double w = bin.compensated_mass + bin.plain_mass;
        op.total_mass += w;
        op.drift += bin.compensated_mass * static_cast<double>(bin.offset) * dx;
        for (long i = 0; i <= last; ++i) {
            const long j = i + bin.offset;
            dense[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(i)] -= w;
            if (j <= 0) {
                // lands on the absorbing side: value 0
                op.killing[static_cast<std::size_t>(i)] += w;
                continue;
            }
            const long col = std::min(j, last);
            dense[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(col)] += w;
        }
    }
    // compensator -drift * u_x, upwinded on the sign of its coefficient
    const double c = -op.drift;
    if (c != 0.0) {
        for (long i = 0; i <= last; ++i) {
            const std::size_t row = static_cast<std::size_t>(i) * n;
            if (c > 0.0) {
                const long j = std::min(i + 1, last);
                dense[row + static_cast<std::size_t>(j)] += c / dx;
                dense[row + static_cast<std::size_t>(i)] -= c / dx;
            } else {
                dense[row + static_cast<std::size_t>(i)] += c / dx;
                if (i - 1 >= 1) dense[row + static_cast<std::size_t>(i - 1)] -= c / dx;
                else op.killing[static_cast<std::size_t>(i)] -= c / dx;
            }
        }
    }
    op.matrix = BandMatrix::from_dense(n, dense);
    op.adjoint = op.matrix.transpose();
    return op;
}

double adjoint_defect(const JumpOperator& op, std::span<const double> u, std::span<const double> m) {
    const Profile lu = op.apply(u);
    const Profile lm = op.apply_adjoint(m);
    return inner(op.grid, lu, m) - inner(op.grid, u, lm);
}

} // namespace mfg
