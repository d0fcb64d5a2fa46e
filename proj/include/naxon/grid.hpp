#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "naxon/errors.hpp"
#include "naxon/quadrature.hpp"

namespace naxon {

/**
 * Equidistant grid {0, 1/n, ..., 1} on the unit interval together with its
 * control cells I_0 = (0, 1/2n), I_k = ((2k-1)/2n, (2k+1)/2n), I_n = ((2n-1)/2n, 1).
 *
 * The cell widths are the trapezoid weights, so sum_k |I_k| = 1 and the
 * weighted inner product below is the discrete L2 product.
 */
class Grid1D {
public:
    explicit Grid1D(std::size_t n) : n_(n) {
        if (n == 0) throw InvalidGrid("grid needs n >= 1 subintervals");
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t size() const noexcept { return n_ + 1; }
    double h() const noexcept { return 1.0 / static_cast<double>(n_); }

    double point(std::size_t k) const noexcept { return static_cast<double>(k) / static_cast<double>(n_); }

    double cell_lo(std::size_t k) const noexcept {
        return k == 0 ? 0.0 : (2.0 * static_cast<double>(k) - 1.0) / (2.0 * static_cast<double>(n_));
    }
    double cell_hi(std::size_t k) const noexcept {
        return k == n_ ? 1.0 : (2.0 * static_cast<double>(k) + 1.0) / (2.0 * static_cast<double>(n_));
    }
    double cell_width(std::size_t k) const noexcept {
        return (k == 0 || k == n_) ? 0.5 / static_cast<double>(n_) : 1.0 / static_cast<double>(n_);
    }

    bool operator==(const Grid1D&) const = default;

private:
    std::size_t n_;
};

inline void require_same_grid(const Grid1D& a, const Grid1D& b, const char* where) {
    if (a != b) {
        throw GridMismatch(std::string(where) + ": grids differ (n=" + std::to_string(a.n()) +
                           " vs n=" + std::to_string(b.n()) + ")");
    }
}

/// Values of a scalar field at the n+1 grid points.
class GridFunction {
public:
    explicit GridFunction(Grid1D grid) : grid_(grid), values_(grid.size(), 0.0) {}

    GridFunction(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw InvalidGrid("GridFunction: expected " + std::to_string(grid_.size()) + " values, got " +
                              std::to_string(values_.size()));
        }
    }

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t k) noexcept { return values_[k]; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    double sup_norm() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    bool operator==(const GridFunction&) const = default;

private:
    Grid1D grid_;
    std::vector<double> values_;
};

/// d x (n+1) gating values, stored row-major (component-major).
class GatingBlock {
public:
    GatingBlock(Grid1D grid, std::size_t d) : grid_(grid), d_(d), values_(d * grid.size(), 0.0) {
        if (d == 0) throw InvalidGrid("GatingBlock: need d >= 1 components");
    }

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t components() const noexcept { return d_; }

    double& operator()(std::size_t i, std::size_t k) noexcept { return values_[i * grid_.size() + k]; }
    double operator()(std::size_t i, std::size_t k) const noexcept { return values_[i * grid_.size() + k]; }

    std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * grid_.size(), grid_.size()}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * grid_.size(), grid_.size()};
    }

    GridFunction component(std::size_t i) const {
        auto r = row(i);
        return GridFunction(grid_, std::vector<double>(r.begin(), r.end()));
    }

    std::span<const double> data() const noexcept { return values_; }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    bool operator==(const GatingBlock&) const = default;

private:
    Grid1D grid_;
    std::size_t d_;
    std::vector<double> values_;
};

/// Neumann discrete Laplacian with the centred ghost-point boundary rows.
inline void discrete_laplacian(std::span<const double> v, std::span<double> out) {
    const std::size_t n = v.size() - 1;
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    out[0] = 2.0 * n2 * (v[1] - v[0]);
    for (std::size_t k = 1; k < n; ++k) out[k] = n2 * (v[k + 1] - 2.0 * v[k] + v[k - 1]);
    out[n] = -2.0 * n2 * (v[n] - v[n - 1]);
}

inline GridFunction discrete_laplacian(const GridFunction& v) {
    if (v.grid().n() < 2) throw InvalidGrid("discrete_laplacian: need n >= 2");
    GridFunction out(v.grid());
    discrete_laplacian(v.values(), out.values());
    return out;
}

/// <u, v>_n with weights 1/(2n) at the ends and 1/n inside.
inline double weighted_inner(std::span<const double> u, std::span<const double> v) {
    const std::size_t n = u.size() - 1;
    double interior = 0.0;
    for (std::size_t k = 1; k < n; ++k) interior += u[k] * v[k];
    return (0.5 * (u[0] * v[0] + u[n] * v[n]) + interior) / static_cast<double>(n);
}

inline double weighted_inner(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u.grid(), v.grid(), "weighted_inner");
    return weighted_inner(u.values(), v.values());
}

inline double weighted_norm_sq(std::span<const double> v) { return weighted_inner(v, v); }
inline double weighted_norm_sq(const GridFunction& v) { return weighted_inner(v.values(), v.values()); }

/// n * sum_k (v_k - v_{k-1})^2, the discrete H1 seminorm squared.
inline double difference_seminorm_sq(std::span<const double> v) {
    const std::size_t n = v.size() - 1;
    double s = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double d = v[k] - v[k - 1];
        s += d * d;
    }
    return static_cast<double>(n) * s;
}

inline double difference_seminorm_sq(const GridFunction& v) { return difference_seminorm_sq(v.values()); }

/// -n * sum_k (v_k - v_{k-1})(u_k - u_{k-1}); equals <A^n v, u>_n.
inline double difference_form(std::span<const double> v, std::span<const double> u) {
    const std::size_t n = v.size() - 1;
    double s = 0.0;
    for (std::size_t k = 1; k <= n; ++k) s += (v[k] - v[k - 1]) * (u[k] - u[k - 1]);
    return -static_cast<double>(n) * s;
}

// Piecewise-linear interpolant; no range check.
inline double interpolate_unchecked(std::span<const double> v, double x) noexcept {
    const std::size_t n = v.size() - 1;
    const double s = x * static_cast<double>(n);
    std::size_t k = static_cast<std::size_t>(std::ceil(s));
    if (k == 0) k = 1;
    if (k > n) k = n;
    const double kd = static_cast<double>(k);
    return (s - kd + 1.0) * v[k] + (kd - s) * v[k - 1];
}

inline double interpolate(const GridFunction& v, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("interpolate: x=" + std::to_string(x) + " outside [0,1]");
    return interpolate_unchecked(v.values(), x);
}

/// Pointwise sampling of u at the grid points.
template <typename F>
GridFunction restrict_function(F&& u, const Grid1D& grid) {
    GridFunction out(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = u(grid.point(k));
    return out;
}

namespace detail {

// Sorted union of the breakpoints of uniform meshes with the given subinterval counts.
inline std::vector<double> union_breakpoints(std::initializer_list<std::size_t> counts) {
    std::vector<double> pts;
    for (std::size_t n : counts) {
        for (std::size_t k = 0; k <= n; ++k) pts.push_back(static_cast<double>(k) / static_cast<double>(n));
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    out.reserve(pts.size());
    for (double p : pts) {
        if (out.empty() || p - out.back() > 1e-14) out.push_back(p);
    }
    return out;
}

}  // namespace detail

/**
 * L2(0,1) distance between the piecewise-linear interpolants of two grid
 * vectors. The integrand is piecewise quadratic on the union of both
 * breakpoint sets and the uniform mesh with quad_n cells, so 2-point Gauss on
 * that union mesh is exact.
 */
inline double interpolant_l2_distance_sq(std::span<const double> v, std::span<const double> w, std::size_t quad_n) {
    const std::size_t nv = v.size() - 1;
    const std::size_t nw = w.size() - 1;
    if (quad_n < std::max(nv, nw)) {
        throw InvalidGrid("interpolant_l2_distance: quad_n=" + std::to_string(quad_n) +
                          " coarser than data n=" + std::to_string(std::max(nv, nw)));
    }
    const double g = 0.5 / std::sqrt(3.0);
    double sum = 0.0;
    const bool common_refinement = quad_n % nv == 0 && quad_n % nw == 0;
    auto add_segment = [&](double a, double b) {
        const double mid = 0.5 * (a + b);
        const double len = b - a;
        const double x1 = mid - g * len;
        const double x2 = mid + g * len;
        const double d1 = interpolate_unchecked(v, x1) - interpolate_unchecked(w, x1);
        const double d2 = interpolate_unchecked(v, x2) - interpolate_unchecked(w, x2);
        sum += 0.5 * len * (d1 * d1 + d2 * d2);
    };
    if (common_refinement) {
        const double h = 1.0 / static_cast<double>(quad_n);
        for (std::size_t j = 0; j < quad_n; ++j) add_segment(j * h, (j + 1) * h);
    } else {
        const auto pts = detail::union_breakpoints({nv, nw, quad_n});
        for (std::size_t j = 0; j + 1 < pts.size(); ++j) add_segment(pts[j], pts[j + 1]);
    }
    return sum;
}

inline double interpolant_l2_distance(const GridFunction& v, const GridFunction& w, std::size_t quad_n) {
    return std::sqrt(interpolant_l2_distance_sq(v.values(), w.values(), quad_n));
}

/// L2 distance between an interpolant and an arbitrary function, by composite Gauss.
template <typename F>
double interpolant_function_l2_distance(std::span<const double> v, F&& f, std::size_t quad_n, int order = 4) {
    const auto rule = gauss_legendre(order);
    const double sq = integrate(
        [&](double x) {
            const double d = interpolate_unchecked(v, x) - f(x);
            return d * d;
        },
        0.0, 1.0, static_cast<int>(quad_n), rule);
    return std::sqrt(sq);
}

}  // namespace naxon
