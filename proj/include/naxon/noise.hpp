#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "naxon/errors.hpp"
#include "naxon/grid.hpp"
#include "naxon/quadrature.hpp"
#include "naxon/rng.hpp"

namespace naxon {

// ---------------------------------------------------------------------------
// Covariance kernels
// ---------------------------------------------------------------------------

using KernelFn = std::function<double(double x, double y)>;

namespace detail {

struct KernelNorms {
    double l2_sq = 0.0;
    double w12_sq = 0.0;
};

// L2 and W^{1,2} norms of b on the unit square; partials by central differences.
inline KernelNorms kernel_norms(const KernelFn& b) {
    const auto rule = gauss_legendre(8);
    constexpr int panels = 16;
    constexpr double h = 1e-6;
    KernelNorms out;
    out.l2_sq = integrate_2d(
        [&](double x, double y) {
            const double v = b(x, y);
            return v * v;
        },
        0.0, 1.0, 0.0, 1.0, panels, rule);
    const double grad_sq = integrate_2d(
        [&](double x, double y) {
            const double bx = (b(x + h, y) - b(x - h, y)) / (2 * h);
            const double by = (b(x, y + h) - b(x, y - h)) / (2 * h);
            return bx * bx + by * by;
        },
        0.0, 1.0, 0.0, 1.0, panels, rule);
    out.w12_sq = out.l2_sq + grad_sq;
    return out;
}

}  // namespace detail

/**
 * Integral kernel b(x, y) of the Hilbert-Schmidt operator B, together with
 * (a bound for) its squared W^{1,2}(O^2) norm.
 */
class CovarianceKernel {
public:
    CovarianceKernel(std::string name, KernelFn eval, std::optional<double> w12_norm_sq = std::nullopt,
                     bool symmetric = true)
        : name_(std::move(name)), eval_(std::move(eval)), symmetric_(symmetric) {
        const auto norms = detail::kernel_norms(eval_);
        if (!std::isfinite(norms.w12_sq)) throw ConstructionError("kernel '" + name_ + "' is not finite on [0,1]^2");
        l2_norm_sq_ = norms.l2_sq;
        w12_norm_sq_ = w12_norm_sq.value_or(norms.w12_sq);
        if (w12_norm_sq_ < 0.95 * l2_norm_sq_) {
            throw ConstructionError("kernel '" + name_ + "': declared W^{1,2} norm below its L2 norm");
        }
    }

    double operator()(double x, double y) const { return eval_(x, y); }

    const std::string& name() const noexcept { return name_; }
    double w12_norm_sq() const noexcept { return w12_norm_sq_; }
    double l2_norm_sq() const noexcept { return l2_norm_sq_; }
    bool symmetric() const noexcept { return symmetric_; }
    bool is_zero() const noexcept { return l2_norm_sq_ == 0.0; }

private:
    std::string name_;
    KernelFn eval_;
    bool symmetric_;
    double l2_norm_sq_ = 0.0;
    double w12_norm_sq_ = 0.0;
};

/// Named kernel selection as it appears in run configs.
struct KernelSpec {
    std::string name = "cosine";
    double amplitude = 1.0;
    double length = 0.1;  // gaussian_bump width

    bool operator==(const KernelSpec&) const = default;
};

inline const std::vector<std::string>& kernel_names() {
    static const std::vector<std::string> names{"zero", "constant", "cosine", "gaussian_bump"};
    return names;
}

inline CovarianceKernel make_kernel(const KernelSpec& spec) {
    const double a = spec.amplitude;
    if (spec.name == "zero") return {"zero", [](double, double) { return 0.0; }, 0.0};
    if (spec.name == "constant") return {"constant", [a](double, double) { return a; }, a * a};
    if (spec.name == "cosine") {
        // ||b||^2 = a^2 (1/4 + pi^2/4 + pi^2/4)
        const double pi2 = std::numbers::pi * std::numbers::pi;
        return {"cosine",
                [a](double x, double y) {
                    return a * std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y);
                },
                a * a * (0.25 + 0.5 * pi2)};
    }
    if (spec.name == "gaussian_bump") {
        if (!(spec.length > 0.0)) throw DomainError("gaussian_bump: length must be positive");
        const double inv = 1.0 / (2.0 * spec.length * spec.length);
        return {"gaussian_bump", [a, inv](double x, double y) { return a * std::exp(-(x - y) * (x - y) * inv); }};
    }
    throw DomainError("unknown kernel '" + spec.name + "'");
}

// ---------------------------------------------------------------------------
// Cell-averaged covariance
// ---------------------------------------------------------------------------

/// (n+1) x (n+1) matrix of cell averages b^n_{k,l}, row-major.
class DiscreteCovariance {
public:
    explicit DiscreteCovariance(Grid1D grid) : grid_(grid), m_(grid.size() * grid.size(), 0.0) {}

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t dim() const noexcept { return grid_.size(); }

    double& operator()(std::size_t k, std::size_t l) noexcept { return m_[k * grid_.size() + l]; }
    double operator()(std::size_t k, std::size_t l) const noexcept { return m_[k * grid_.size() + l]; }

    std::span<const double> row(std::size_t k) const noexcept { return {m_.data() + k * dim(), dim()}; }
    std::span<double> row(std::size_t k) noexcept { return {m_.data() + k * dim(), dim()}; }

    bool is_zero() const noexcept {
        for (double v : m_) {
            if (v != 0.0) return false;
        }
        return true;
    }

private:
    Grid1D grid_;
    std::vector<double> m_;
};

namespace detail {

// Gauss nodes mapped into every cell of the grid, plus weights normalised to sum to one per cell.
struct CellQuadrature {
    std::size_t per_cell = 0;
    std::vector<double> x;  // (n+1) * per_cell
    std::vector<double> w;  // same layout, sum over a cell = 1
};

inline CellQuadrature cell_quadrature(const Grid1D& grid, int points) {
    const auto rule = gauss_legendre(points);
    CellQuadrature cq;
    cq.per_cell = rule.size();
    cq.x.resize(grid.size() * cq.per_cell);
    cq.w.resize(cq.x.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double lo = grid.cell_lo(k), hi = grid.cell_hi(k);
        for (std::size_t q = 0; q < cq.per_cell; ++q) {
            cq.x[k * cq.per_cell + q] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[q];
            cq.w[k * cq.per_cell + q] = 0.5 * rule.weights[q];
        }
    }
    return cq;
}

}  // namespace detail

/// b^n_{k,l} = (|I_k||I_l|)^{-1} int_{I_k} int_{I_l} b, by tensor Gauss with `quad_points` per axis per cell.
inline DiscreteCovariance discretize_kernel(const CovarianceKernel& kernel, const Grid1D& grid, int quad_points = 4) {
    if (quad_points < 2) throw DomainError("discretize_kernel: quad_points must be >= 2");
    const auto cq = detail::cell_quadrature(grid, quad_points);
    DiscreteCovariance cov(grid);
    const std::size_t p = cq.per_cell;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (std::size_t l = 0; l < grid.size(); ++l) {
            double s = 0.0;
            for (std::size_t a = 0; a < p; ++a) {
                double inner = 0.0;
                for (std::size_t b = 0; b < p; ++b) {
                    inner += cq.w[l * p + b] * kernel(cq.x[k * p + a], cq.x[l * p + b]);
                }
                s += cq.w[k * p + a] * inner;
            }
            if (!std::isfinite(s)) {
                throw ConstructionError("discretize_kernel: non-finite average in cell (" + std::to_string(k) + "," +
                                        std::to_string(l) + ")");
            }
            cov(k, l) = s;
        }
    }
    return cov;
}

/**
 * Squared Hilbert-Schmidt distance between b and the kernel of the discrete
 * operator: linear interpolation in x of the rows b^n_{k,.}, piecewise
 * constant in y on the cells. Measured by composite Gauss quadrature.
 */
inline double hs_discretization_error_sq(const CovarianceKernel& kernel, const DiscreteCovariance& cov,
                                         int panels = 4, int order = 6) {
    const Grid1D& g = cov.grid();
    const std::size_t n = g.n();
    const auto rule = gauss_legendre(order);
    double total = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double a = g.point(k - 1), b = g.point(k);
        for (std::size_t l = 0; l <= n; ++l) {
            const double bk = cov(k, l), bkm = cov(k - 1, l);
            total += integrate_2d(
                [&](double x, double y) {
                    const double s = x * static_cast<double>(n);
                    const double wk = s - static_cast<double>(k) + 1.0;
                    const double wkm = static_cast<double>(k) - s;
                    const double bxy = kernel(x, y);
                    const double e = wk * (bxy - bk) + wkm * (bxy - bkm);
                    return e * e;
                },
                a, b, g.cell_lo(l), g.cell_hi(l), panels, rule);
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Brownian increments
// ---------------------------------------------------------------------------

/**
 * Increments over one time step of the n+1 cell Brownian motions
 * beta_k = <W, |I_k|^{-1/2} 1_{I_k}> for the U noise and each of the d gating
 * noises.
 *
 * The primary data are the raw cell integrals <dW, 1_{I_k}> in fixed point
 * (int64 multiples of 2^quantum_exp). Aggregating to coarser grids is then an
 * exact integer sum, so refining-then-coarsening in any order gives
 * bit-identical increments.
 */
class NoiseIncrementSet {
public:
    NoiseIncrementSet(Grid1D grid, std::size_t d, double dt, int quantum_exp)
        : grid_(grid), d_(d), dt_(dt), quantum_exp_(quantum_exp), raw_((d + 1) * grid.size(), 0),
          beta_((d + 1) * grid.size(), 0.0) {}

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t gating_components() const noexcept { return d_; }
    double dt() const noexcept { return dt_; }
    int quantum_exp() const noexcept { return quantum_exp_; }

    std::uint64_t seed = 0;
    std::uint64_t step = 0;

    /// U-noise increments dB_k (each ~ N(0, dt)).
    std::span<const double> dB() const noexcept { return {beta_.data(), grid_.size()}; }
    /// Gating-noise increments of component i.
    std::span<const double> dBi(std::size_t i) const noexcept {
        return {beta_.data() + (i + 1) * grid_.size(), grid_.size()};
    }
    std::span<const std::int64_t> raw(std::size_t component) const noexcept {
        return {raw_.data() + component * grid_.size(), grid_.size()};
    }
    std::span<std::int64_t> raw(std::size_t component) noexcept {
        return {raw_.data() + component * grid_.size(), grid_.size()};
    }

    /// Recomputes the normalised increments from the raw integrals.
    void finalize() noexcept {
        for (std::size_t c = 0; c <= d_; ++c) {
            for (std::size_t k = 0; k < grid_.size(); ++k) {
                const std::size_t idx = c * grid_.size() + k;
                beta_[idx] = std::ldexp(static_cast<double>(raw_[idx]), quantum_exp_) / std::sqrt(grid_.cell_width(k));
            }
        }
    }

    /// Scales every increment; used by the linearity checks.
    void scale(double c) noexcept {
        for (double& b : beta_) b *= c;
    }

    void set_zero() noexcept {
        std::fill(raw_.begin(), raw_.end(), 0);
        std::fill(beta_.begin(), beta_.end(), 0.0);
    }

private:
    Grid1D grid_;
    std::size_t d_;
    double dt_;
    int quantum_exp_;
    std::vector<std::int64_t> raw_;
    std::vector<double> beta_;
};

/// Fixed-point resolution: 2^-40 of the increment standard deviation, rounded to a power of two.
inline int increment_quantum_exp(double dt) {
    return static_cast<int>(std::floor(std::log2(std::sqrt(dt)))) - 40;
}

/// Draws (d+1)(n+1) independent N(0, dt) increments for time step `step` of stream `seed`.
inline NoiseIncrementSet sample_increments(const Grid1D& grid, std::size_t d, double dt, std::uint64_t seed,
                                           std::uint64_t step) {
    if (!(dt > 0.0)) throw DomainError("sample_increments: dt must be positive");
    NoiseIncrementSet inc(grid, d, dt, increment_quantum_exp(dt));
    inc.seed = seed;
    inc.step = step;
    for (std::size_t c = 0; c <= d; ++c) {
        auto raw = inc.raw(c);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double z = standard_normal({seed, static_cast<std::uint32_t>(c), step, static_cast<std::uint32_t>(k)});
            const double cell_integral = std::sqrt(dt * grid.cell_width(k)) * z;
            raw[k] = std::llround(std::ldexp(cell_integral, -inc.quantum_exp()));
        }
    }
    inc.finalize();
    return inc;
}

/**
 * Coarsens increments by an odd factor m: every coarse cell is an exact union
 * of fine cells, and beta^c_k = |I^c_k|^{-1/2} sum_{l in k} |I^f_l|^{1/2} beta^f_l.
 */
inline NoiseIncrementSet aggregate_increments(const NoiseIncrementSet& fine, std::size_t m) {
    const std::size_t nf = fine.grid().n();
    if (m < 3 || m % 2 == 0) throw DomainError("aggregate_increments: refinement factor must be odd and >= 3");
    if (nf % m != 0) throw DomainError("aggregate_increments: factor does not divide n");
    const std::size_t nc = nf / m;
    if (nc < 2) throw InvalidGrid("aggregate_increments: coarse grid would have n < 2");
    const Grid1D coarse(nc);
    NoiseIncrementSet out(coarse, fine.gating_components(), fine.dt(), fine.quantum_exp());
    out.seed = fine.seed;
    out.step = fine.step;
    const std::size_t half = (m - 1) / 2;
    for (std::size_t c = 0; c <= fine.gating_components(); ++c) {
        const auto src = fine.raw(c);
        auto dst = out.raw(c);
        for (std::size_t k = 0; k <= nc; ++k) {
            const std::size_t lo = k == 0 ? 0 : k * m - half;
            const std::size_t hi = k == nc ? nf : k * m + half;
            std::int64_t s = 0;
            for (std::size_t l = lo; l <= hi; ++l) s += src[l];
            dst[k] = s;
        }
    }
    out.finalize();
    return out;
}

// ---------------------------------------------------------------------------
// Applying the discrete noise operators
// ---------------------------------------------------------------------------

/**
 * Dense operator G_{k,l} = b^n_{k,l} |I_l|^{1/2}; G * dB realises
 * sum_l b^n_{k,l} <dW, 1_{I_l}>, the cell-averaged B dW.
 */
class AdditiveNoiseOperator {
public:
    explicit AdditiveNoiseOperator(const DiscreteCovariance& cov)
        : grid_(cov.grid()), g_(cov.dim() * cov.dim()), zero_(cov.is_zero()) {
        const std::size_t m = cov.dim();
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t l = 0; l < m; ++l) g_[k * m + l] = cov(k, l) * std::sqrt(grid_.cell_width(l));
        }
    }

    const Grid1D& grid() const noexcept { return grid_; }
    bool is_zero() const noexcept { return zero_; }

    /// out += G * dB
    void apply_add(std::span<const double> dB, std::span<double> out) const noexcept {
        if (zero_) return;
        const std::size_t m = grid_.size();
        for (std::size_t k = 0; k < m; ++k) {
            const double* row = g_.data() + k * m;
            double s = 0.0;
            for (std::size_t l = 0; l < m; ++l) s += row[l] * dB[l];
            out[k] += s;
        }
    }

private:
    Grid1D grid_;
    std::vector<double> g_;
    bool zero_;
};

inline GridFunction apply_additive_noise(const DiscreteCovariance& cov, const NoiseIncrementSet& inc) {
    require_same_grid(cov.grid(), inc.grid(), "apply_additive_noise");
    GridFunction out(cov.grid());
    AdditiveNoiseOperator(cov).apply_add(inc.dB(), out.values());
    return out;
}

// ---------------------------------------------------------------------------
// Multiplicative gating noise
// ---------------------------------------------------------------------------

/// Amplitude a_i(u, x) of a product-form gating kernel b_i = a_i(u, x) c_i(x_pos, y).
using GatingAmplitudeFn = std::function<double(double u, std::span<const double> x)>;
/// General gating kernel b_i(u, x, x_pos, y).
using GatingKernelFn = std::function<double(double u, std::span<const double> x, double x_pos, double y)>;

/// Kernel for one gating component: either product form or a general callable.
struct GatingComponentKernel {
    GatingAmplitudeFn amplitude;                 // product form when set
    std::optional<CovarianceKernel> spatial;     // product form when set
    GatingKernelFn general;                      // used when product form is absent

    bool product_form() const noexcept { return static_cast<bool>(amplitude) && spatial.has_value(); }

    double operator()(double u, std::span<const double> x, double xp, double y) const {
        return product_form() ? amplitude(u, x) * (*spatial)(xp, y) : general(u, x, xp, y);
    }
};

/**
 * Multiplicative noise kernels b_i for the gating equations, Lipschitz in
 * (u, x) with constant `lipschitz`. With `cutoff` set, a component's noise is
 * switched off on cells where its interpolated state leaves [0, 1].
 */
struct GatingNoiseKernel {
    std::vector<GatingComponentKernel> components;
    double lipschitz = 1.0;
    bool cutoff = true;

    std::size_t size() const noexcept { return components.size(); }
    bool empty() const noexcept { return components.empty(); }
};

/// sigma_i x_i (1 - x_i) c(x_pos, y): the Hodgkin-Huxley channel-noise form.
inline GatingNoiseKernel product_gating_kernel(const std::vector<double>& sigma, const CovarianceKernel& spatial) {
    GatingNoiseKernel gk;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const double s = sigma[i];
        GatingComponentKernel c;
        c.amplitude = [s, i](double, std::span<const double> x) { return s * x[i] * (1.0 - x[i]); };
        c.spatial = spatial;
        gk.components.push_back(std::move(c));
    }
    // |s x(1-x) - s y(1-y)| <= s |x - y| on [0,1]; the spatial factor multiplies the constant.
    double smax = 0.0;
    for (double s : sigma) smax = std::max(smax, std::abs(s));
    double cmax = 0.0;
    const auto rule = gauss_legendre(6);
    for (double x : rule.nodes) {
        for (double y : rule.nodes) cmax = std::max(cmax, std::abs(spatial(0.5 * (x + 1), 0.5 * (y + 1))));
    }
    gk.lipschitz = std::max(1e-12, smax * std::max(cmax, 1.0));
    return gk;
}

namespace detail {

// Indicator of the interpolated component staying inside [0,1] on cell k.
inline bool cell_inside_unit(std::span<const double> xi, std::size_t k) noexcept {
    const std::size_t n = xi.size() - 1;
    auto in = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in(xi[k])) return false;
    if (k > 0 && !in(0.5 * (xi[k - 1] + xi[k]))) return false;
    if (k < n && !in(0.5 * (xi[k] + xi[k + 1]))) return false;
    return true;
}

}  // namespace detail

/// b^n_{i,k,l}(u, x) for a single component i.
inline DiscreteCovariance gating_noise_component(const GatingNoiseKernel& gk, std::size_t i, std::span<const double> u,
                                                 const GatingBlock& x, const detail::CellQuadrature& cq) {
    const Grid1D& grid = x.grid();
    const std::size_t d = x.components();
    const std::size_t p = cq.per_cell;
    std::vector<double> xs(d);
    DiscreteCovariance cov(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (gk.cutoff && !detail::cell_inside_unit(x.row(i), k)) continue;
        for (std::size_t a = 0; a < p; ++a) {
            const double xp = cq.x[k * p + a];
            const double ut = interpolate_unchecked(u, xp);
            for (std::size_t j = 0; j < d; ++j) xs[j] = interpolate_unchecked(x.row(j), xp);
            for (std::size_t l = 0; l < grid.size(); ++l) {
                double inner = 0.0;
                for (std::size_t b = 0; b < p; ++b) {
                    inner += cq.w[l * p + b] * gk.components[i](ut, xs, xp, cq.x[l * p + b]);
                }
                cov(k, l) += cq.w[k * p + a] * inner;
            }
        }
    }
    return cov;
}

/**
 * b^n_{i,k,l}(u, x): cell averages of b_i evaluated along the interpolants of
 * u and x, one matrix per gating component.
 */
inline std::vector<DiscreteCovariance> gating_noise_matrix(const GatingNoiseKernel& gk, const GridFunction& u,
                                                           const GatingBlock& x, int quad_points = 4) {
    require_same_grid(u.grid(), x.grid(), "gating_noise_matrix");
    if (gk.size() > x.components()) throw GridMismatch("gating_noise_matrix: more kernels than gating components");
    const auto cq = detail::cell_quadrature(u.grid(), quad_points);
    std::vector<DiscreteCovariance> out;
    for (std::size_t i = 0; i < gk.size(); ++i) out.push_back(gating_noise_component(gk, i, u.values(), x, cq));
    return out;
}

/**
 * Stepping form of the gating noise: out_i = sum_l b^n_{i,k,l}(u,x) |I_l|^{1/2} dB_{i,l}.
 *
 * For product-form kernels the y-averages of the spatial factor at the
 * x-quadrature nodes are precomputed, so one application costs
 * O(quad * (n+1)^2) instead of re-integrating the full kernel.
 */
class GatingNoiseOperator {
public:
    GatingNoiseOperator(const GatingNoiseKernel& gk, const Grid1D& grid, int quad_points = 4)
        : gk_(gk), grid_(grid), cq_(detail::cell_quadrature(grid, quad_points)) {
        const std::size_t m = grid.size();
        const std::size_t p = cq_.per_cell;
        for (const auto& comp : gk_.components) {
            std::vector<double> table;
            if (comp.product_form()) {
                // table[(k*p + a)*m + l] = avg_{y in I_l} c(x_{k,a}, y) * |I_l|^{1/2}
                table.resize(m * p * m);
                for (std::size_t k = 0; k < m; ++k) {
                    for (std::size_t a = 0; a < p; ++a) {
                        const double xp = cq_.x[k * p + a];
                        for (std::size_t l = 0; l < m; ++l) {
                            double s = 0.0;
                            for (std::size_t b = 0; b < p; ++b) s += cq_.w[l * p + b] * (*comp.spatial)(xp, cq_.x[l * p + b]);
                            table[(k * p + a) * m + l] = s * std::sqrt(grid.cell_width(l));
                        }
                    }
                }
            }
            tables_.push_back(std::move(table));
        }
    }

    std::size_t size() const noexcept { return gk_.size(); }

    /// out += noise increment of gating component i.
    void apply_add(std::size_t i, std::span<const double> u, const GatingBlock& x, std::span<const double> dBi,
                   std::span<double> out) const {
        const auto& comp = gk_.components[i];
        const std::size_t m = grid_.size();
        const std::size_t p = cq_.per_cell;
        const std::size_t d = x.components();
        std::vector<double> xs(d);
        if (comp.product_form()) {
            const auto& table = tables_[i];
            for (std::size_t k = 0; k < m; ++k) {
                if (gk_.cutoff && !detail::cell_inside_unit(x.row(i), k)) continue;
                double acc = 0.0;
                for (std::size_t a = 0; a < p; ++a) {
                    const double xp = cq_.x[k * p + a];
                    const double ut = interpolate_unchecked(u, xp);
                    for (std::size_t j = 0; j < d; ++j) xs[j] = interpolate_unchecked(x.row(j), xp);
                    const double amp = comp.amplitude(ut, xs);
                    if (amp == 0.0) continue;
                    const double* row = table.data() + (k * p + a) * m;
                    double s = 0.0;
                    for (std::size_t l = 0; l < m; ++l) s += row[l] * dBi[l];
                    acc += cq_.w[k * p + a] * amp * s;
                }
                out[k] += acc;
            }
        } else {
            const auto cov = gating_noise_component(gk_, i, u, x, cq_);
            for (std::size_t k = 0; k < m; ++k) {
                double s = 0.0;
                for (std::size_t l = 0; l < m; ++l) s += cov(k, l) * std::sqrt(grid_.cell_width(l)) * dBi[l];
                out[k] += s;
            }
        }
    }

private:
    GatingNoiseKernel gk_;
    Grid1D grid_;
    detail::CellQuadrature cq_;
    std::vector<std::vector<double>> tables_;
};

}  // namespace naxon
