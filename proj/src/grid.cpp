#include "mfg/grid.hpp"

#include "mfg/error.hpp"
#include "mfg/kernels.hpp"

#include <algorithm>
#include <string>

namespace mfg {

Grid::Grid(double x_max_, std::size_t nx_, double horizon_, std::size_t nt_)
    : x_max(x_max_), nx(nx_), horizon(horizon_), nt(nt_) {
    if (!(x_max > 0.0)) throw Error(ErrorKind::parameter, "grid x_max must be positive");
    if (nx < 2) throw Error(ErrorKind::parameter, "grid needs at least two interior nodes");
    if (!(horizon > 0.0)) throw Error(ErrorKind::parameter, "horizon must be positive");
    if (nt < 1) throw Error(ErrorKind::parameter, "grid needs at least one time step");
    dx = x_max / static_cast<double>(nx + 1);
    dt = horizon / static_cast<double>(nt);
}

double Grid::x(std::size_t i) const { return i == nx + 1 ? x_max : static_cast<double>(i) * dx; }

double Grid::t(std::size_t n) const { return n == nt ? horizon : static_cast<double>(n) * dt; }

Field::Field(const Grid& grid, Unit unit, bool dirichlet_left)
    : grid_(grid), unit_(unit), dirichlet_left_(dirichlet_left), rows_(grid.nt + 1),
      cols_(grid.nodes()), data_(rows_ * cols_, 0.0) {}

std::span<const double> Field::row(std::size_t n) const {
    return std::span<const double>(data_).subspan(n * cols_, cols_);
}

void Field::set_row(std::size_t n, std::span<const double> values) {
    if (n >= rows_) throw Error(ErrorKind::dimension, "time level out of range");
    if (values.size() != cols_) throw Error(ErrorKind::dimension, "profile length does not match grid");
    std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(n * cols_));
    if (dirichlet_left_) data_[n * cols_] = 0.0;
}

double Field::min() const { return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end()); }
double Field::max() const { return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end()); }

void check_profile(const Grid& grid, std::span<const double> f, const char* what) {
    if (f.size() != grid.nodes()) {
        throw Error(ErrorKind::dimension, std::string(what) + ": expected " +
                                              std::to_string(grid.nodes()) + " values, got " +
                                              std::to_string(f.size()));
    }
}

Profile gradient(const Grid& grid, std::span<const double> f, Difference scheme,
                 std::span<const double> drift, Ghost ghost) {
    check_profile(grid, f, "gradient");
    const std::size_t n = grid.nodes();
    const std::size_t last = grid.last();
    auto value = [&](std::ptrdiff_t i) {
        if (i < 0) return 0.0;
        if (static_cast<std::size_t>(i) > last) return ghost == Ghost::constant ? f[last] : 0.0;
        return f[static_cast<std::size_t>(i)];
    };
    Profile out(n);
    if (scheme == Difference::central) {
        const double inv = 0.5 / grid.dx;
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = static_cast<std::ptrdiff_t>(i);
            out[i] = (value(k + 1) - value(k - 1)) * inv;
        }
        return out;
    }
    check_profile(grid, drift, "upwind drift");
    const double inv = 1.0 / grid.dx;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        out[i] = drift[i] >= 0.0 ? (value(k + 1) - value(k)) * inv : (value(k) - value(k - 1)) * inv;
    }
    return out;
}

Profile backward_gradient(const Grid& grid, std::span<const double> f) {
    check_profile(grid, f, "backward_gradient");
    Profile out(grid.nodes());
    const double inv = 1.0 / grid.dx;
    out[0] = f[0] * inv;
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = (f[i] - f[i - 1]) * inv;
    return out;
}

double integrate(const Grid& grid, std::span<const double> f) {
    check_profile(grid, f, "integrate");
    return grid.dx * (kernels::sum(f) - 0.5 * (f.front() + f.back()));
}

double inner(const Grid& grid, std::span<const double> f, std::span<const double> g) {
    check_profile(grid, f, "inner");
    check_profile(grid, g, "inner");
    return grid.dx * (kernels::dot(f, g) - 0.5 * (f.front() * g.front() + f.back() * g.back()));
}

} // namespace mfg
