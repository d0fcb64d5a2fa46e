#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "naxon/errors.hpp"
#include "naxon/models.hpp"
#include "naxon/rng.hpp"

namespace naxon {

/// One audited inequality: the largest observed ratio lhs / bound (pass when <= 1), or a sign check.
struct AuditCheck {
    explicit AuditCheck(std::string n = {}) : name(std::move(n)) {}

    std::string name;
    bool pass = true;
    bool ratio = true;    // worst is max lhs / rhs (pass <= 1); otherwise max violation (pass <= 0)
    double worst = 0.0;
    double at_u = 0.0;    // where the worst case was found
    std::string note;
};

struct AssumptionResult {
    explicit AssumptionResult(std::string n = {}) : name(std::move(n)) {}

    std::string name;
    bool applicable = true;
    bool pass = true;
    std::vector<AuditCheck> checks;
    std::string note;
};

struct AuditReport {
    std::string model;
    double u_lo = 0.0;
    double u_hi = 0.0;
    std::size_t samples = 0;
    DeclaredConstants declared;
    double one_sided_u = 0.0;      // max d_u f observed
    double joint_one_sided = 0.0;  // max <F(a)-F(b), a-b> / |a-b|^2 observed
    std::vector<AssumptionResult> assumptions;

    /// Every applicable assumption passes.
    bool pass() const {
        return std::all_of(assumptions.begin(), assumptions.end(),
                           [](const AssumptionResult& a) { return !a.applicable || a.pass; });
    }

    std::vector<std::string> failures() const {
        std::vector<std::string> out;
        for (const auto& a : assumptions) {
            if (!a.applicable || a.pass) continue;
            for (const auto& c : a.checks) {
                if (!c.pass) out.push_back(a.name + "." + c.name);
            }
        }
        return out;
    }
};

namespace detail {

// Deterministic uniform stream for audit sampling.
class AuditSampler {
public:
    explicit AuditSampler(std::uint64_t seed) : seed_(seed) {}

    double uniform(double lo, double hi) {
        const auto r = Philox4x32::generate({static_cast<std::uint32_t>(ctr_), static_cast<std::uint32_t>(ctr_ >> 32),
                                             0x41554454u, 0u},
                                            {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
        ++ctr_;
        return lo + (hi - lo) * u01_open(r[0], r[1]);
    }

private:
    std::uint64_t seed_;
    std::uint64_t ctr_ = 0;
};

inline void note_value(AuditCheck& c, double value, double u) {
    if (value > c.worst) {
        c.worst = value;
        c.at_u = u;
    }
}

inline void note_ratio(AuditCheck& c, double lhs, double rhs, double u) {
    note_value(c, rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0), u);
}

inline AuditCheck violation_check(std::string name) {
    AuditCheck c{std::move(name)};
    c.ratio = false;
    return c;
}

// Ratios pass up to 1 (plus rounding slack); violations must be exactly zero.
inline void finish(AssumptionResult& a) {
    a.pass = true;
    for (auto& c : a.checks) {
        if (c.note != "not applicable") c.pass = c.ratio ? c.worst <= 1.0 + 1e-9 : c.worst <= 0.0;
        a.pass = a.pass && c.pass;
    }
}

}  // namespace detail

/**
 * Samples (u, x) in u_box x [0,1]^d and checks the declared constants
 * against the growth, gradient, one-sided, monotonicity, sign, kernel and
 * (when declared) joint one-sided Lipschitz inequalities. Gradients are
 * central differences.
 */
inline AuditReport audit_assumptions(const ModelSpec& spec, double u_lo, double u_hi, std::size_t samples,
                                     std::uint64_t seed = 0x5EED) {
    if (!(u_hi > u_lo)) throw DomainError("audit: empty u box");
    if (samples < 1000) throw DomainError("audit: need at least 1000 samples");
    spec.validate();
    const auto& c = spec.declared;
    const std::size_t d = spec.d;
    detail::AuditSampler rng(seed);

    AuditReport rep;
    rep.model = spec.name;
    rep.u_lo = u_lo;
    rep.u_hi = u_hi;
    rep.samples = samples;
    rep.declared = c;
    rep.one_sided_u = -INFINITY;

    AssumptionResult a1{"assumption1_drift"};
    AuditCheck growth_f{"growth_f"}, grad_f{"gradient_f"}, onesided_f{"one_sided_f"};
    AuditCheck growth_fi{"growth_fi"}, grad_fi{"gradient_fi"}, onesided_fi{"one_sided_fi"}, rho_growth{"rho_i_growth"};
    AuditCheck r_range{"r_in_2_4"};
    r_range.worst = (c.r >= 2.0 && c.r <= 4.0) ? 0.0 : 2.0;

    AssumptionResult a2{"assumption2_monotone_invariance"};
    AuditCheck mono = detail::violation_check("monotone_outside_K");
    AuditCheck sign_lo = detail::violation_check("sign_at_or_below_0");
    AuditCheck sign_hi = detail::violation_check("sign_at_or_above_1");
    std::size_t mono_samples = 0;

    std::vector<double> x(d), xp(d);
    auto f = [&](double u, const std::vector<double>& xv) { return spec.drift_u(u, xv); };

    for (std::size_t s = 0; s < samples; ++s) {
        const double u = rng.uniform(u_lo, u_hi);
        for (std::size_t i = 0; i < d; ++i) x[i] = rng.uniform(0.0, 1.0);
        const double hu = 1e-6 * std::max(1.0, std::abs(u));
        const double hx = 1e-6;

        // f and its gradient
        const double fv = f(u, x);
        const double dfu = (f(u + hu, x) - f(u - hu, x)) / (2 * hu);
        double grad_sq = dfu * dfu;
        for (std::size_t i = 0; i < d; ++i) {
            xp = x;
            xp[i] += hx;
            const double fp = f(u, xp);
            xp[i] -= 2 * hx;
            const double fm = f(u, xp);
            const double g = (fp - fm) / (2 * hx);
            grad_sq += g * g;
        }
        const double rho = spec.rho ? spec.rho(x) : 0.0;
        const double env = c.L * (1.0 + std::pow(std::abs(u), c.r - 1.0)) * (1.0 + rho);
        detail::note_ratio(growth_f, std::abs(fv), env, u);
        detail::note_ratio(grad_f, std::sqrt(grad_sq), env, u);
        detail::note_ratio(onesided_f, std::max(0.0, dfu), c.L * (1.0 + rho), u);
        rep.one_sided_u = std::max(rep.one_sided_u, dfu);

        if (std::abs(u) > c.K) {
            ++mono_samples;
            // d_u f <= -kappa_K up to the finite-difference error.
            detail::note_value(mono, dfu + c.kappa_K - 1e-7 * (1.0 + std::abs(dfu)), u);
        }

        // gating components, sampled also slightly outside [0,1]
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = x[i];
            const double fi = spec.drift_gating(i, u, xi);
            const double gu = (spec.drift_gating(i, u + hu, xi) - spec.drift_gating(i, u - hu, xi)) / (2 * hu);
            const double gx = (spec.drift_gating(i, u, xi + hx) - spec.drift_gating(i, u, xi - hx)) / (2 * hx);
            const double rhoi = spec.rho_i ? spec.rho_i(i, u) : 0.0;
            const double envi = c.L * (1.0 + rhoi) * (1.0 + std::abs(xi));
            detail::note_ratio(growth_fi, std::abs(fi), envi, u);
            detail::note_ratio(grad_fi, std::sqrt(gu * gu + gx * gx), envi, u);
            detail::note_ratio(onesided_fi, std::max(0.0, gx), c.L, u);
            if (spec.rho_i) detail::note_ratio(rho_growth, rhoi, c.rho_scale * std::exp(c.alpha * std::abs(u)), u);

            // Sign conditions at and beyond the faces of [0,1]; exact comparisons.
            const double below = -rng.uniform(0.0, 1.0);
            const double above = 1.0 + rng.uniform(0.0, 1.0);
            for (double xl : {0.0, below}) detail::note_value(sign_lo, -spec.drift_gating(i, u, xl), u);
            for (double xh : {1.0, above}) detail::note_value(sign_hi, spec.drift_gating(i, u, xh), u);
        }
    }
    if (!spec.rho_i) rho_growth.note = "no state-dependent Lipschitz growth declared";
    a1.checks = {growth_f, grad_f, onesided_f, growth_fi, grad_fi, onesided_fi, rho_growth, r_range};
    detail::finish(a1);

    if (mono_samples == 0) mono.note = "no sampled |u| > K; condition vacuous on this box";
    if (!spec.gating_invariance) {
        a2.note = "invariance sign conditions not applicable to this model";
        for (auto* ch : {&sign_lo, &sign_hi}) {
            ch->note = "not applicable";
            ch->pass = true;
        }
    }
    a2.checks = {mono, sign_lo, sign_hi};
    detail::finish(a2);

    // Assumption 3: kernel regularity and the Lipschitz property of the gating kernels.
    AssumptionResult a3{"assumption3_kernels"};
    AuditCheck w12{"u_kernel_w12"};
    w12.worst = spec.noise_u.l2_norm_sq() > 0.0 ? spec.noise_u.l2_norm_sq() / spec.noise_u.w12_norm_sq() : 0.0;
    w12.note = "kernel '" + spec.noise_u.name() + "', ||b||^2_W12 = " + std::to_string(spec.noise_u.w12_norm_sq());
    AuditCheck lip{"gating_kernel_lipschitz"};
    if (spec.noise_gating.empty()) {
        lip.note = "no gating noise";
    } else {
        const auto& gk = spec.noise_gating;
        std::vector<double> y(d);
        const std::size_t pairs = std::max<std::size_t>(samples / 10, 100);
        for (std::size_t s = 0; s < pairs; ++s) {
            const double u = rng.uniform(u_lo, u_hi), v = rng.uniform(u_lo, u_hi);
            double dx = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                x[i] = rng.uniform(0.0, 1.0);
                y[i] = rng.uniform(0.0, 1.0);
                dx += (x[i] - y[i]) * (x[i] - y[i]);
            }
            const double pos = rng.uniform(0.0, 1.0), q = rng.uniform(0.0, 1.0);
            for (std::size_t i = 0; i < gk.size(); ++i) {
                const double diff = std::abs(gk.components[i](u, x, pos, q) - gk.components[i](v, y, pos, q));
                detail::note_ratio(lip, diff, gk.lipschitz * (std::abs(u - v) + std::sqrt(dx)), u);
            }
        }
    }
    a3.checks = {w12, lip};
    detail::finish(a3);

    // Assumption 4: joint one-sided Lipschitz condition on R x R^d.
    AssumptionResult a4{"assumption4_one_sided"};
    a4.applicable = spec.one_sided_lipschitz;
    AuditCheck joint{"joint_one_sided"};
    {
        std::vector<double> y(d);
        double worst = -INFINITY;
        for (std::size_t s = 0; s < samples; ++s) {
            const double u = rng.uniform(u_lo, u_hi);
            const double v = rng.uniform(u_lo, u_hi);
            double num = 0.0, den = (u - v) * (u - v);
            for (std::size_t i = 0; i < d; ++i) {
                x[i] = rng.uniform(-1.0, 2.0);
                y[i] = rng.uniform(-1.0, 2.0);
                den += (x[i] - y[i]) * (x[i] - y[i]);
            }
            num += (spec.drift_u(u, x) - spec.drift_u(v, y)) * (u - v);
            for (std::size_t i = 0; i < d; ++i) {
                num += (spec.drift_gating(i, u, x[i]) - spec.drift_gating(i, v, y[i])) * (x[i] - y[i]);
            }
            if (den > 0.0) worst = std::max(worst, num / den);
        }
        rep.joint_one_sided = worst;
        joint.worst = worst / c.L;
    }
    a4.checks = {joint};
    detail::finish(a4);
    if (!a4.applicable) a4.note = "not declared for this model";

    rep.assumptions = {a1, a2, a3, a4};
    return rep;
}

inline nlohmann::json to_json(const AuditCheck& c) {
    return {{"name", c.name}, {"pass", c.pass}, {"worst_ratio", c.worst}, {"at_u", c.at_u}, {"note", c.note}};
}

inline nlohmann::json to_json(const AuditReport& r) {
    nlohmann::json as = nlohmann::json::array();
    for (const auto& a : r.assumptions) {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : a.checks) checks.push_back(to_json(c));
        as.push_back({{"name", a.name}, {"applicable", a.applicable}, {"pass", a.pass}, {"note", a.note},
                      {"checks", checks}});
    }
    const auto& c = r.declared;
    return {{"version", 1},
            {"model", r.model},
            {"u_box", {r.u_lo, r.u_hi}},
            {"samples", r.samples},
            {"declared",
             {{"L", c.L}, {"r", c.r}, {"rho0", c.rho0}, {"alpha", c.alpha}, {"rho_scale", c.rho_scale}, {"K", c.K},
              {"kappa_K", c.kappa_K}}},
            {"max_du_f", r.one_sided_u},
            {"joint_one_sided_constant", r.joint_one_sided},
            {"assumptions", as},
            {"pass", r.pass()},
            {"failures", r.failures()}};
}

}  // namespace naxon
