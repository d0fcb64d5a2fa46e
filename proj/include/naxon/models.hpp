#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "naxon/errors.hpp"
#include "naxon/noise.hpp"

namespace naxon {

// ---------------------------------------------------------------------------
// Hodgkin-Huxley
// ---------------------------------------------------------------------------

/**
 * Voltage dependence of one opening/closing rate.
 *
 *   LinExp:  c1 (u + s) / (1 - exp(-c2 (u + s)))   (removable singularity at u = -s)
 *   Exp:     c1 exp(-c2 (u + s))
 *   Sigmoid: c1 / (1 + exp(-c2 (u + s)))
 */
struct RateShape {
    enum class Kind { LinExp, Exp, Sigmoid };

    Kind kind = Kind::LinExp;
    double c1 = 1.0;
    double c2 = 1.0;
    double shift = 0.0;

    // Below this |c2 (u + s)| the LinExp form switches to its Taylor expansion.
    static constexpr double kTaylorWindow = 1e-4;

    double value(double u) const noexcept {
        const double z = u + shift;
        switch (kind) {
            case Kind::LinExp: {
                const double s = c2 * z;
                if (std::abs(s) < kTaylorWindow) return c1 * (1.0 / c2 + z / 2.0 + c2 * z * z / 12.0);
                return c1 * z / (-std::expm1(-s));
            }
            case Kind::Exp: return c1 * std::exp(-c2 * z);
            case Kind::Sigmoid: return c1 / (1.0 + std::exp(-c2 * z));
        }
        return 0.0;
    }

    double derivative(double u) const noexcept {
        const double z = u + shift;
        switch (kind) {
            case Kind::LinExp: {
                const double s = c2 * z;
                if (std::abs(s) < kTaylorWindow) return c1 * (0.5 + c2 * z / 6.0);
                const double e = std::exp(-s);
                const double den = -std::expm1(-s);
                return c1 * (den - s * e) / (den * den);
            }
            case Kind::Exp: return -c2 * value(u);
            case Kind::Sigmoid: {
                const double v = value(u);
                return c2 * v * (1.0 - v / c1);
            }
        }
        return 0.0;
    }

    // Bound on |derivative| of the form slope_bound * (1 + value).
    double slope_bound() const noexcept {
        switch (kind) {
            case Kind::LinExp: return c1;
            case Kind::Exp: return c2;
            case Kind::Sigmoid: return 0.25 * c1 * c2;
        }
        return 0.0;
    }

    bool operator==(const RateShape&) const = default;
};

struct GateParams {
    RateShape alpha;
    RateShape beta;
    double sigma = 0.0;  // channel-noise amplitude

    bool operator==(const GateParams&) const = default;
};

enum class Gate : std::size_t { N = 0, M = 1, H = 2 };

/**
 * Hodgkin-Huxley cable parameters. The defaults are the literature-standard
 * squid-axon set (mV, ms, mS/cm^2, resting potential near -65 mV); tau and
 * lambda are artifact defaults for an axon of one space constant.
 */
struct HHParams {
    double tau = 1.0;
    double lambda = 1.0;
    double g_na = 120.0;
    double g_k = 36.0;
    double g_l = 0.3;
    double e_na = 50.0;
    double e_k = -77.0;
    double e_l = -54.4;
    std::array<GateParams, 3> gates{
        GateParams{{RateShape::Kind::LinExp, 0.01, 0.1, 55.0}, {RateShape::Kind::Exp, 0.125, 1.0 / 80.0, 65.0}, 0.1},
        GateParams{{RateShape::Kind::LinExp, 0.1, 0.1, 40.0}, {RateShape::Kind::Exp, 4.0, 1.0 / 18.0, 65.0}, 0.1},
        GateParams{{RateShape::Kind::Exp, 0.07, 1.0 / 20.0, 65.0}, {RateShape::Kind::Sigmoid, 1.0, 0.1, 35.0}, 0.1},
    };

    void validate() const {
        if (!(tau > 0.0)) throw DomainError("hh.tau must be positive");
        if (!(lambda > 0.0)) throw DomainError("hh.lambda must be positive");
        if (!(g_na > 0.0 && g_k > 0.0 && g_l > 0.0)) throw DomainError("hh conductances must be positive");
        for (const auto& g : gates) {
            for (const auto* r : {&g.alpha, &g.beta}) {
                if (!(r->c1 > 0.0 && r->c2 > 0.0)) throw DomainError("hh rate constants must be positive");
            }
        }
    }

    bool operator==(const HHParams&) const = default;
};

/// (alpha_x(u), beta_x(u)) for gate x.
inline std::pair<double, double> hh_rate_functions(double u, Gate x, const HHParams& p) {
    const auto& g = p.gates[static_cast<std::size_t>(x)];
    return {g.alpha.value(u), g.beta.value(u)};
}

/// Membrane drift (1/tau)[-g_Na m^3 h (u - E_Na) - g_K n^4 (u - E_K) - g_L (u - E_L)], x = (n, m, h).
inline double hh_drift_u(double u, std::span<const double> x, const HHParams& p) noexcept {
    const double n = x[0], m = x[1], h = x[2];
    const double n2 = n * n;
    return (-p.g_na * m * m * m * h * (u - p.e_na) - p.g_k * n2 * n2 * (u - p.e_k) - p.g_l * (u - p.e_l)) / p.tau;
}

inline double hh_drift_gating(double u, double xi, Gate i, const HHParams& p) noexcept {
    const auto& g = p.gates[static_cast<std::size_t>(i)];
    return g.alpha.value(u) * (1.0 - xi) - g.beta.value(u) * xi;
}

inline double hh_steady_state(double u, Gate i, const HHParams& p) {
    const auto [a, b] = hh_rate_functions(u, i, p);
    return a / (a + b);
}

// ---------------------------------------------------------------------------
// FitzHugh-Nagumo
// ---------------------------------------------------------------------------

/// du = u - cubic u^3 - w,  dw = rate (u - decay w + offset).
struct FHNParams {
    double cubic = 1.0 / 3.0;
    double rate = 0.08;
    double decay = 0.8;
    double offset = 0.7;

    bool operator==(const FHNParams&) const = default;
};

inline std::pair<double, double> fhn_drift(double u, double w, const FHNParams& p) noexcept {
    return {u - p.cubic * u * u * u - w, p.rate * (u - p.decay * w + p.offset)};
}

// ---------------------------------------------------------------------------
// Abstract model
// ---------------------------------------------------------------------------

/// Constants the analysis is stated in terms of; audited, and used by the G_t monitor.
struct DeclaredConstants {
    double L = 1.0;
    double r = 2.0;
    double rho0 = 1.0;       // sup of rho over [0,1]^d
    double alpha = 1.0;      // rho_i(u) <= rho_scale * exp(alpha |u|)
    double rho_scale = 1.0;
    double K = 0.0;          // monotonicity threshold
    double kappa_K = 0.0;    // d_u f <= -kappa_K for |u| > K
    double g_process_K = 1.0;
    double margin_R = 1.0;   // R in the pathwise bound

    bool operator==(const DeclaredConstants&) const = default;
};

using DriftU = std::function<double(double u, std::span<const double> x)>;
using DriftGating = std::function<double(std::size_t i, double u, double xi)>;

/**
 * dU = (nu A U + f(U, X)) dt + B dW,  dX_i = f_i(U, X_i) dt + B_i(U, X) dW_i.
 */
struct ModelSpec {
    std::string name;
    std::size_t d = 1;
    double nu = 1.0;
    DriftU drift_u;
    DriftGating drift_gating;
    std::function<double(std::span<const double> x)> rho;
    std::function<double(std::size_t i, double u)> rho_i;  // empty when the f_i Lipschitz constants do not grow
    DeclaredConstants declared;
    CovarianceKernel noise_u{"zero", [](double, double) { return 0.0; }, 0.0};
    GatingNoiseKernel noise_gating;
    bool gating_invariance = true;   // second part of the monotonicity assumption applies
    bool one_sided_lipschitz = false;
    std::function<double(double R, const DeclaredConstants&)> weight_integrand_override;

    void validate() const {
        if (d < 1) throw DomainError("model: d must be >= 1");
        if (!(nu > 0.0)) throw DomainError("model: nu must be positive");
        if (!(declared.r >= 2.0 && declared.r <= 4.0)) throw DomainError("model: r must lie in [2, 4]");
        if (!drift_u || !drift_gating) throw DomainError("model: drift functions missing");
        if (!noise_gating.empty() && noise_gating.size() != d) {
            throw DomainError("model: gating noise must have one kernel per component");
        }
    }

    /// sup of rho_i over [-R, R], taken at the endpoints.
    double rho_i_envelope(std::size_t i, double R) const {
        if (!rho_i) return 0.0;
        return std::max(rho_i(i, R), rho_i(i, -R));
    }

    /// Integrand of G_t at envelope R:
    /// 2L^2(1 + R^{r-1})^2(1 + rho0)^2 + 4L^2 sum_i (1 + rho_i(R))^2 + K(d L^2 + 1).
    double weight_integrand(double R) const {
        if (weight_integrand_override) return weight_integrand_override(R, declared);
        const double L = declared.L;
        const double a = L * (1.0 + std::pow(R, declared.r - 1.0)) * (1.0 + declared.rho0);
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double b = 1.0 + rho_i_envelope(i, R);
            s += b * b;
        }
        return 2.0 * a * a + 4.0 * L * L * s + declared.g_process_K * (static_cast<double>(d) * L * L + 1.0);
    }
};

/// rho_i(u) = max{alpha + beta, alpha' + beta'} for one HH gate.
inline double hh_rho_i(const GateParams& g, double u) noexcept {
    return std::max(g.alpha.value(u) + g.beta.value(u), g.alpha.derivative(u) + g.beta.derivative(u));
}

/// rho(n, m, h) = max{|n|^4, |m|^3|h|, |m|^3, |m|^2|h|, |n|^3}.
inline double hh_rho(std::span<const double> x) noexcept {
    const double n = std::abs(x[0]), m = std::abs(x[1]), h = std::abs(x[2]);
    return std::max({n * n * n * n, m * m * m * h, m * m * m, m * m * h, n * n * n});
}

/// Lipschitz/growth constants for HH derived from the parameter set by the triangle inequality.
inline DeclaredConstants hh_declared_constants(const HHParams& p) {
    DeclaredConstants c;
    const double emax = std::max({1.0, std::abs(p.e_na), std::abs(p.e_k), std::abs(p.e_l)});
    const double lf = ((p.g_na + p.g_k + p.g_l) + 4.0 * (p.g_na + p.g_k) * emax) / p.tau;
    double lg = 0.0;
    for (const auto& g : p.gates) lg = std::max(lg, 1.0 + g.alpha.slope_bound() + g.beta.slope_bound());
    c.L = std::max(lf, lg);
    c.r = 2.0;
    c.rho0 = 1.0;
    c.alpha = 0.05;
    c.rho_scale = 10.0;
    c.K = 0.0;
    c.kappa_K = p.g_l / p.tau;
    c.margin_R = 1.0;
    return c;
}

/// Spatial kernels and amplitudes of the noise terms.
struct NoiseSpec {
    KernelSpec u_kernel{"cosine", 1.0, 0.1};
    KernelSpec gating_kernel{"cosine", 1.0, 0.1};
    bool gating_noise = true;

    bool operator==(const NoiseSpec&) const = default;
};

inline ModelSpec make_hh_model(const HHParams& p, const NoiseSpec& noise) {
    p.validate();
    ModelSpec m;
    m.name = "hh";
    m.d = 3;
    m.nu = p.lambda * p.lambda / p.tau;
    m.drift_u = [p](double u, std::span<const double> x) { return hh_drift_u(u, x, p); };
    m.drift_gating = [p](std::size_t i, double u, double xi) { return hh_drift_gating(u, xi, static_cast<Gate>(i), p); };
    m.rho = hh_rho;
    m.rho_i = [p](std::size_t i, double u) { return hh_rho_i(p.gates[i], u); };
    m.declared = hh_declared_constants(p);
    m.noise_u = make_kernel(noise.u_kernel);
    if (noise.gating_noise) {
        std::vector<double> sigma;
        for (const auto& g : p.gates) sigma.push_back(g.sigma);
        m.noise_gating = product_gating_kernel(sigma, make_kernel(noise.gating_kernel));
    }
    m.gating_invariance = true;
    m.one_sided_lipschitz = false;
    return m;
}

inline ModelSpec make_fhn_model(const FHNParams& p, const NoiseSpec& noise) {
    ModelSpec m;
    m.name = "fhn";
    m.d = 1;
    m.nu = 1.0;
    m.drift_u = [p](double u, std::span<const double> x) { return fhn_drift(u, x[0], p).first; };
    m.drift_gating = [p](std::size_t, double u, double w) { return p.rate * (u - p.decay * w + p.offset); };
    m.rho = [](std::span<const double> x) { return std::abs(x[0]); };
    m.rho_i = [](std::size_t, double u) { return std::abs(u); };
    m.declared.L = 2.0;
    m.declared.r = 4.0;
    m.declared.rho0 = 1.0;
    m.declared.alpha = 1.0;
    m.declared.rho_scale = 1.0;
    m.declared.K = 1.5;
    m.declared.kappa_K = 1.25;
    m.declared.margin_R = 1.5;
    m.noise_u = make_kernel(noise.u_kernel);
    m.gating_invariance = false;
    m.one_sided_lipschitz = true;
    // The recovery variable enters no Lipschitz constant: G uses 4(1 + R^4) + K(L^2 + 1).
    m.weight_integrand_override = [](double R, const DeclaredConstants& c) {
        return 4.0 * (1.0 + R * R * R * R) + c.g_process_K * (c.L * c.L + 1.0);
    };
    return m;
}

/**
 * User-defined model: f(u, x) = sum_j poly_u[j] u^j - coupling * x_1,
 * f_1(u, x) = eps (u - gamma x + beta); one gating component, additive U noise only.
 */
struct CustomParams {
    std::vector<double> poly_u{0.0};
    double coupling = 0.0;
    double eps = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    double nu = 1.0;
    DeclaredConstants declared{};
    bool gating_invariance = false;
    bool one_sided_lipschitz = false;

    bool operator==(const CustomParams&) const = default;
};

inline ModelSpec make_custom_model(const CustomParams& p, const NoiseSpec& noise) {
    ModelSpec m;
    m.name = "custom";
    m.d = 1;
    m.nu = p.nu;
    m.drift_u = [p](double u, std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = p.poly_u.size(); j-- > 0;) s = s * u + p.poly_u[j];
        return s - p.coupling * x[0];
    };
    m.drift_gating = [p](std::size_t, double u, double x) { return p.eps * (u - p.gamma * x + p.beta); };
    m.rho = [](std::span<const double> x) { return std::abs(x[0]); };
    m.rho_i = [](std::size_t, double u) { return std::abs(u); };
    m.declared = p.declared;
    m.noise_u = make_kernel(noise.u_kernel);
    m.gating_invariance = p.gating_invariance;
    m.one_sided_lipschitz = p.one_sided_lipschitz;
    return m;
}

/// f = 0, f_1 = 0, no noise: the Neumann heat equation u_t = nu u_xx with one inert gating component.
inline ModelSpec make_heat_model(double nu = 1.0) {
    ModelSpec m;
    m.name = "heat";
    m.d = 1;
    m.nu = nu;
    m.drift_u = [](double, std::span<const double>) { return 0.0; };
    m.drift_gating = [](std::size_t, double, double) { return 0.0; };
    m.rho = [](std::span<const double>) { return 0.0; };
    m.declared.L = 1.0;
    m.declared.r = 2.0;
    m.declared.rho0 = 0.0;
    m.declared.K = 1.0;
    m.declared.kappa_K = 1.0;
    m.gating_invariance = true;
    m.one_sided_lipschitz = true;
    return m;
}

}  // namespace naxon
