#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "naxon/errors.hpp"
#include "naxon/grid.hpp"
#include "naxon/models.hpp"
#include "naxon/noise.hpp"
#include "naxon/solver.hpp"

namespace naxon {

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

struct RateFit {
    double slope = 0.0;      // error ~ C n^{-slope}
    double intercept = 0.0;  // log C
    double residual = 0.0;   // sqrt of the sum of squared log residuals
    std::size_t used = 0;
    std::vector<std::string> warnings;
};

/// Least squares on (log n, log_error); non-finite log errors are dropped with a warning.
inline RateFit fit_rate_log(const std::vector<std::pair<double, double>>& points) {
    RateFit fit;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, le] : points) {
        if (!(n > 0.0) || !std::isfinite(le)) {
            fit.warnings.push_back("excluded point n=" + std::to_string(n) + " (non-positive error)");
            continue;
        }
        pts.emplace_back(std::log(n), le);
    }
    if (pts.size() < 3) throw DomainError("fit_rate: fewer than 3 usable points");
    const double k = static_cast<double>(pts.size());
    double sx = 0, sy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
    }
    const double mx = sx / k, my = sy / k;
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw DomainError("fit_rate: all points share the same n");
    const double b = sxy / sxx;
    fit.slope = -b;
    fit.intercept = my - b * mx;
    double rss = 0.0;
    for (const auto& [x, y] : pts) {
        const double r = y - (fit.intercept + b * x);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss);
    fit.used = pts.size();
    return fit;
}

/// Least squares on (log n, log error); zero or negative errors are excluded with a warning.
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    std::vector<std::pair<double, double>> logs;
    for (const auto& [n, e] : points) {
        logs.emplace_back(n, e > 0.0 ? std::log(e) : -std::numeric_limits<double>::infinity());
    }
    return fit_rate_log(logs);
}

// ---------------------------------------------------------------------------
// Error norm
// ---------------------------------------------------------------------------

/**
 * ||E||_{H_{d+1}}: sqrt of the squared L2 interpolant distance of u plus those
 * of every gating component. Null gating blocks mean d = 0. quad_n = 0 uses the
 * finer grid.
 */
inline double h_d1_distance(const GridFunction& ua, const GatingBlock* xa, const GridFunction& ub,
                            const GatingBlock* xb, std::size_t quad_n = 0) {
    const std::size_t na = ua.grid().n(), nb = ub.grid().n();
    if (na % nb != 0 && nb % na != 0) throw GridMismatch("h_d1_distance: grids are not nested");
    if ((xa == nullptr) != (xb == nullptr) || (xa && xa->components() != xb->components())) {
        throw GridMismatch("h_d1_distance: gating component counts differ");
    }
    if (xa && (xa->grid() != ua.grid() || xb->grid() != ub.grid())) {
        throw GridMismatch("h_d1_distance: gating block and u live on different grids");
    }
    if (quad_n == 0) quad_n = std::max(na, nb);
    double sq = interpolant_l2_distance_sq(ua.values(), ub.values(), quad_n);
    if (xa) {
        for (std::size_t i = 0; i < xa->components(); ++i) sq += interpolant_l2_distance_sq(xa->row(i), xb->row(i), quad_n);
    }
    return std::sqrt(sq);
}

inline double h_d1_distance(const SystemState& a, const SystemState& b, std::size_t quad_n = 0) {
    return h_d1_distance(a.u, &a.x, b.u, &b.x, quad_n);
}

// ---------------------------------------------------------------------------
// Hierarchy experiments
// ---------------------------------------------------------------------------

enum class Reference { Finest, ExactHeat };

inline const char* reference_name(Reference r) noexcept { return r == Reference::ExactHeat ? "exact_heat" : "finest"; }

struct HierarchySpec {
    std::size_t n0 = 9;
    std::size_t m = 3;
    std::size_t levels = 3;
    double dt = 1e-4;
    double T = 1.0;
    std::size_t record_every = 10;
    std::vector<std::uint64_t> seeds{1};
    Reference reference = Reference::Finest;
    bool track_regularity = false;

    bool operator==(const HierarchySpec&) const = default;

    void validate() const {
        if (m < 3 || m % 2 == 0) throw ConfigError("converge.m", "refinement factor must be odd and >= 3");
        if (n0 < 2) throw ConfigError("converge.n0", "coarsest level must have n >= 2");
        if (levels < 1) throw ConfigError("converge.levels", "need at least one test level");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("converge.dt", "time step must be positive");
        if (!(T >= dt) || !std::isfinite(T)) throw ConfigError("converge.T", "horizon must be >= dt");
        if (record_every < 1) throw ConfigError("converge.record_every", "stride must be >= 1");
        if (seeds.empty()) throw ConfigError("seeds", "need at least one seed");
    }

    std::vector<std::size_t> test_levels() const {
        std::vector<std::size_t> out;
        std::size_t n = n0;
        for (std::size_t j = 0; j < levels; ++j, n *= m) out.push_back(n);
        return out;
    }

    std::size_t n_ref() const noexcept {
        std::size_t n = n0;
        for (std::size_t j = 0; j < levels; ++j) n *= m;
        return n;
    }

    SolverConfig solver_config(std::uint64_t seed) const {
        SolverConfig c;
        c.dt = dt;
        c.T = T;
        c.record_every = record_every;
        c.seed = seed;
        c.track_regularity = track_regularity;
        return c;
    }
};

struct ErrorSample {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    double plain = 0.0;                                               // sup_t ||E^n(t)||
    double log_weighted = -std::numeric_limits<double>::infinity();  // sup_t (log ||E^n(t)|| - G_t / 2)
    double au_energy = 0.0;                                           // int |A^n U^n|_n^2 dt when tracked

    /// sup_t e^{-G_t/2} ||E^n(t)||; underflows to 0 for very large G.
    double weighted() const noexcept { return std::exp(log_weighted); }
};

struct SeedResult {
    std::uint64_t seed = 0;
    bool failed = false;
    std::size_t fail_step = 0;
    std::size_t fail_level = 0;
    std::string message;
    std::vector<ErrorSample> samples;  // one per test level
};

/// Initial data sampled pointwise at every level.
struct InitialData {
    std::function<double(double)> u0 = [](double) { return 0.0; };
    std::function<double(std::size_t, double)> x0 = [](std::size_t, double) { return 0.0; };
};

namespace detail {

inline double log_or_neg_inf(double v) {
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

inline SeedResult run_seed(const ModelSpec& model, const HierarchySpec& hier, const InitialData& init,
                           std::uint64_t seed, int quad_points) {
    SeedResult res;
    res.seed = seed;
    const auto ns = hier.test_levels();
    const std::size_t L = ns.size();
    const bool exact = hier.reference == Reference::ExactHeat;
    const SolverConfig cfg = hier.solver_config(seed);

    // Index L is the reference level in finest mode.
    std::vector<Stepper> steppers;
    std::vector<SystemState> states;
    std::vector<std::size_t> all = ns;
    if (!exact) all.push_back(hier.n_ref());
    steppers.reserve(all.size());
    states.reserve(all.size());
    for (std::size_t n : all) {
        const Grid1D g(n);
        steppers.emplace_back(model, g, cfg, quad_points);
        states.push_back(steppers.back().initial_state(sample_initial_u(init.u0, g), sample_initial_x(init.x0, g, model.d)));
    }
    for (std::size_t n : ns) res.samples.push_back({seed, n});

    const bool noisy = steppers.back().stochastic();
    const std::size_t quad_n = exact ? 3 * ns.back() : hier.n_ref();
    const double nu = model.nu;
    const double G_exact_rate = exact ? model.weight_integrand(1.0 + model.declared.margin_R) : 0.0;

    auto measure = [&](std::uint64_t step) {
        const double t = static_cast<double>(step) * hier.dt;
        double scale = 1.0;
        for (const auto& st : states) scale = std::max(scale, st.u.sup_norm());
        const double roundoff_floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
        for (std::size_t l = 0; l < L; ++l) {
            double err;
            double G;
            if (exact) {
                const double amp = std::exp(-std::numbers::pi * std::numbers::pi * nu * t);
                err = interpolant_function_l2_distance(
                    states[l].u.values(), [amp](double x) { return amp * std::cos(std::numbers::pi * x); }, quad_n);
                G = G_exact_rate * t;
            } else {
                err = h_d1_distance(states[l], states[L], quad_n);
                G = states[L].mon.G;
            }
            // Interpolation roundoff between grids is not an error; with G_t ~ 1e9 per step
            // it would otherwise own the weighted supremum at t = 0.
            if (err <= roundoff_floor) err = 0.0;
            auto& s = res.samples[l];
            s.plain = std::max(s.plain, err);
            s.log_weighted = std::max(s.log_weighted, log_or_neg_inf(err) - 0.5 * G);
        }
    };

    const std::uint64_t steps = cfg.steps();
    std::size_t current_level = 0;
    try {
        measure(0);
        for (std::uint64_t j = 0; j < steps; ++j) {
            if (noisy) {
                const Grid1D gref(all.back());
                NoiseIncrementSet inc = sample_increments(gref, model.d, hier.dt, seed, j);
                for (std::size_t l = all.size(); l-- > 0;) {
                    if (l + 1 < all.size()) inc = aggregate_increments(inc, hier.m);
                    current_level = all[l];
                    steppers[l].step(states[l], inc);
                }
            } else {
                for (std::size_t l = 0; l < all.size(); ++l) {
                    current_level = all[l];
                    steppers[l].step(states[l], nullptr);
                }
            }
            if ((j + 1) % hier.record_every == 0 || j + 1 == steps) measure(j + 1);
        }
    } catch (const DivergenceError& e) {
        res.failed = true;
        res.fail_step = e.step();
        res.fail_level = current_level;
        res.message = e.what();
        return res;
    }
    for (std::size_t l = 0; l < L; ++l) res.samples[l].au_energy = states[l].mon.au_energy;
    return res;
}

}  // namespace detail

/**
 * Runs every seed of the hierarchy. Per seed, reference increments are drawn
 * each step and aggregated down the levels, so all levels see one Wiener
 * realization; seeds run on `threads` workers and results are indexed by seed.
 */
inline std::vector<SeedResult> run_hierarchy(const ModelSpec& model, const HierarchySpec& hier,
                                             const InitialData& init, unsigned threads = 1, int quad_points = 4) {
    hier.validate();
    model.validate();
    if (hier.reference == Reference::ExactHeat && (model.noise_u.is_zero() == false || !model.noise_gating.empty())) {
        throw ConfigError("converge.reference", "exact_heat reference requires noise off");
    }
    std::vector<SeedResult> results(hier.seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < results.size(); i = next++) {
            results[i] = detail::run_seed(model, hier, init, hier.seeds[i], quad_points);
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(results.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return results;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct LevelStats {
    std::size_t n = 0;
    std::size_t count = 0;
    double mean_err = 0.0;
    double median_err = 0.0;
    double stderr_err = 0.0;
    double log_mean_werr = 0.0;  // log of the mean weighted error (log-sum-exp)
    double mean_werr = 0.0;
    double mean_au_energy = 0.0;
};

struct Failure {
    std::uint64_t seed = 0;
    std::size_t level = 0;
    std::size_t step = 0;
    std::string message;
};

struct ConvergenceReport {
    std::vector<LevelStats> levels;
    std::size_t n_ref = 0;
    RateFit slope_plain;
    RateFit slope_weighted;
    std::vector<Failure> failures;
    std::size_t seeds_total = 0;
    double wall_seconds = 0.0;

    double failure_fraction() const noexcept {
        return seeds_total ? static_cast<double>(failures.size()) / static_cast<double>(seeds_total) : 0.0;
    }
};

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

/// Per-level statistics and fitted slopes over the successful seeds.
inline ConvergenceReport aggregate_report(const std::vector<SeedResult>& results, std::size_t n_ref = 0) {
    ConvergenceReport rep;
    rep.n_ref = n_ref;
    rep.seeds_total = results.size();
    std::vector<const SeedResult*> ok;
    for (const auto& r : results) {
        if (r.failed) {
            rep.failures.push_back({r.seed, r.fail_level, r.fail_step, r.message});
        } else {
            ok.push_back(&r);
        }
    }
    if (ok.empty()) throw DomainError("aggregate_report: no successful seed");
    const std::size_t L = ok.front()->samples.size();
    for (std::size_t l = 0; l < L; ++l) {
        LevelStats st;
        st.n = ok.front()->samples[l].n;
        st.count = ok.size();
        std::vector<double> plain;
        double max_lw = -std::numeric_limits<double>::infinity();
        for (const auto* r : ok) {
            plain.push_back(r->samples[l].plain);
            max_lw = std::max(max_lw, r->samples[l].log_weighted);
            st.mean_au_energy += r->samples[l].au_energy;
        }
        const double k = static_cast<double>(ok.size());
        st.mean_au_energy /= k;
        for (double e : plain) st.mean_err += e;
        st.mean_err /= k;
        st.median_err = median_of(plain);
        if (ok.size() > 1) {
            double ss = 0.0;
            for (double e : plain) ss += (e - st.mean_err) * (e - st.mean_err);
            st.stderr_err = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
        }
        if (std::isfinite(max_lw)) {
            double s = 0.0;
            for (const auto* r : ok) s += std::exp(r->samples[l].log_weighted - max_lw);
            st.log_mean_werr = max_lw + std::log(s / k);
        } else {
            st.log_mean_werr = max_lw;
        }
        st.mean_werr = std::exp(st.log_mean_werr);
        rep.levels.push_back(st);
    }
    if (L >= 3) {
        std::vector<std::pair<double, double>> p, w;
        for (const auto& st : rep.levels) {
            p.emplace_back(static_cast<double>(st.n), st.mean_err);
            w.emplace_back(static_cast<double>(st.n), st.log_mean_werr);
        }
        rep.slope_plain = fit_rate(p);
        rep.slope_weighted = fit_rate_log(w);
    }
    return rep;
}

namespace detail {

inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

inline nlohmann::json to_json(const RateFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}, {"points", f.used},
            {"warnings", f.warnings}};
}

}  // namespace detail

/// Report JSON; wall-clock time is left out so reruns are byte-identical.
inline nlohmann::json to_json(const ConvergenceReport& r, const nlohmann::json& config_echo) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& st : r.levels) {
        levels.push_back({{"n", st.n},
                          {"seeds", st.count},
                          {"mean_err", st.mean_err},
                          {"median_err", st.median_err},
                          {"stderr", st.stderr_err},
                          {"mean_werr", st.mean_werr},
                          {"log_mean_werr", detail::finite_or_null(st.log_mean_werr)},
                          {"mean_au_energy", st.mean_au_energy}});
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : r.failures) {
        failures.push_back({{"seed", f.seed}, {"level", f.level}, {"step", f.step}, {"message", f.message}});
    }
    return {{"version", 1},
            {"config", config_echo},
            {"n_ref", r.n_ref},
            {"levels", levels},
            {"slope_plain", r.slope_plain.slope},
            {"slope_weighted", r.slope_weighted.slope},
            {"fits", {{"plain", detail::to_json(r.slope_plain)}, {"weighted", detail::to_json(r.slope_weighted)}}},
            {"residuals", {{"plain", r.slope_plain.residual}, {"weighted", r.slope_weighted.residual}}},
            {"seeds_total", r.seeds_total},
            {"failures", failures}};
}

/// One row per (seed, level).
inline void write_samples_csv(std::ostream& os, const std::vector<SeedResult>& results) {
    os << "seed,n,plain_err,weighted_err,log_weighted_err,au_energy,failed\n";
    os.precision(17);
    for (const auto& r : results) {
        if (r.failed) {
            os << r.seed << "," << r.fail_level << ",,,,,1\n";
            continue;
        }
        for (const auto& s : r.samples) {
            os << s.seed << "," << s.n << "," << s.plain << "," << s.weighted() << ",";
            if (std::isfinite(s.log_weighted)) os << s.log_weighted;
            os << "," << s.au_energy << ",0\n";
        }
    }
}

}  // namespace naxon
