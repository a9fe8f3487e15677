#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfg {

using Profile = std::vector<double>;

/// Truncated space-time lattice on [0, T] x [0, x_max].
///
/// Spatial nodes are x_i = i * dx for i = 0..nx+1, so node 0 sits on the
/// absorbing boundary and node nx+1 on the truncation point. Time levels are
/// t_n = n * dt for n = 0..nt.
struct Grid {
    double x_max = 0.0;
    std::size_t nx = 0;
    double horizon = 0.0;
    std::size_t nt = 0;
    double dx = 0.0;
    double dt = 0.0;

    Grid() = default;
    Grid(double x_max, std::size_t nx, double horizon, std::size_t nt);

    std::size_t nodes() const { return nx + 2; }
    std::size_t last() const { return nx + 1; }
    double x(std::size_t i) const;
    double t(std::size_t n) const;

    bool operator==(const Grid&) const = default;
};

enum class Unit { currency, density, dimensionless };

/// Values beyond x_max: value functions are continued by their last node,
/// densities by zero.
enum class Ghost { constant, zero };

/// Time-indexed family of spatial profiles, stored row-major by time level.
class Field {
public:
    Field() = default;
    Field(const Grid& grid, Unit unit, bool dirichlet_left);

    const Grid& grid() const { return grid_; }
    Unit unit() const { return unit_; }
    bool dirichlet_left() const { return dirichlet_left_; }

    std::span<const double> row(std::size_t n) const;
    /// Overwrites level n; column 0 is pinned to zero for Dirichlet fields.
    void set_row(std::size_t n, std::span<const double> values);
    double at(std::size_t n, std::size_t i) const { return data_[n * cols_ + i]; }
    /// Direct write access; callers must respect the Dirichlet column themselves.
    double& at(std::size_t n, std::size_t i) { return data_[n * cols_ + i]; }

    std::span<const double> data() const { return data_; }
    std::size_t levels() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double min() const;
    double max() const;

private:
    Grid grid_;
    Unit unit_ = Unit::dimensionless;
    bool dirichlet_left_ = false;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class Difference { central, upwind };

/// Discrete first derivative of a profile on `grid`.
///
/// Central: (f[i+1] - f[i-1]) / 2dx, using the ghost rule past x_max and a zero
/// extension left of node 0. Upwind: forward difference where drift[i] >= 0,
/// backward difference where drift[i] < 0 (drift is the coefficient of f_x in a
/// backward transport equation).
Profile gradient(const Grid& grid, std::span<const double> f, Difference scheme,
                 std::span<const double> drift = {}, Ghost ghost = Ghost::constant);

/// Backward difference (f[i] - f[i-1]) / dx with f[-1] = 0; node 0 yields f[0]/dx.
Profile backward_gradient(const Grid& grid, std::span<const double> f);

/// Trapezoidal rule over [0, x_max].
double integrate(const Grid& grid, std::span<const double> f);

/// Trapezoidal inner product.
double inner(const Grid& grid, std::span<const double> f, std::span<const double> g);

void check_profile(const Grid& grid, std::span<const double> f, const char* what);

} // namespace mfg
