#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "naxon/errors.hpp"
#include "naxon/grid.hpp"
#include "naxon/models.hpp"
#include "naxon/noise.hpp"
#include "naxon/tridiag.hpp"

namespace naxon {

enum class Scheme { SemiImplicit, Explicit };

inline const char* scheme_name(Scheme s) noexcept { return s == Scheme::Explicit ? "explicit" : "semi_implicit"; }

struct SolverConfig {
    double dt = 1e-3;
    double T = 1.0;
    Scheme scheme = Scheme::SemiImplicit;
    bool clamp_gating = false;
    std::size_t record_every = 1;
    std::uint64_t seed = 0;
    bool track_regularity = false;  // accumulate int |A^n u|_n^2 dt

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "time step must be positive and finite");
        if (!(T >= dt) || !std::isfinite(T)) throw ConfigError("T", "horizon must be finite and >= dt");
        if (record_every < 1) throw ConfigError("record_every", "stride must be >= 1");
    }

    std::uint64_t steps() const noexcept { return static_cast<std::uint64_t>(std::floor(T / dt + 1e-9)); }

    bool operator==(const SolverConfig&) const = default;
};

/// Running diagnostics along a trajectory.
struct Monitors {
    double sup_u = 0.0;          // running max of ||u||_inf
    double R = 0.0;              // envelope: sup_u + margin
    double G = 0.0;              // accumulated weight
    double max_excursion = 0.0;  // largest distance of any gating value from [0,1]
    double au_energy = 0.0;      // int_0^t |A^n u|_n^2 ds when tracked
};

struct SystemState {
    double t = 0.0;
    std::uint64_t step = 0;
    GridFunction u;
    GatingBlock x;
    Monitors mon;
};

struct TrajectoryRecord {
    std::vector<double> t;
    std::vector<GridFunction> u;
    std::vector<GatingBlock> x;
    std::vector<double> R;
    std::vector<double> G;
    std::vector<double> excursion;  // running max up to each snapshot
    double max_excursion = 0.0;
    Monitors final_monitors;

    std::size_t size() const noexcept { return t.size(); }
};

/// Distance of v from [0, 1].
inline double unit_excursion(double v) noexcept { return v < 0.0 ? -v : (v > 1.0 ? v - 1.0 : 0.0); }

/**
 * One grid level of the semi-discrete system, advanced in time by
 * semi-implicit (or explicit) Euler-Maruyama:
 *
 *   (I - dt nu A^n) u+ = u + dt f(u, x) + B^n dW
 *   x_i+ = x_i + dt f_i(u, x_i) + B^n_i(u, x) dW_i
 */
class Stepper {
public:
    Stepper(ModelSpec model, Grid1D grid, SolverConfig cfg, int quad_points = 4)
        : model_(std::move(model)), grid_(grid), cfg_(cfg), noise_u_(discretize_kernel(model_.noise_u, grid, quad_points)),
          rhs_(grid.size()), lap_(grid.size()), xk_(model_.d), x_next_(grid, model_.d) {
        model_.validate();
        cfg_.validate();
        if (grid.n() < 2) throw InvalidGrid("solver: need n >= 2");
        if (cfg_.scheme == Scheme::SemiImplicit) diffusion_.emplace(grid.n(), cfg_.dt * model_.nu);
        if (!model_.noise_gating.empty()) gating_.emplace(model_.noise_gating, grid, quad_points);
    }

    const Grid1D& grid() const noexcept { return grid_; }
    const ModelSpec& model() const noexcept { return model_; }
    const SolverConfig& config() const noexcept { return cfg_; }

    /// True when at least one noise term can be non-zero.
    bool stochastic() const noexcept { return !noise_u_.is_zero() || gating_.has_value(); }

    SystemState initial_state(GridFunction u0, GatingBlock x0) const {
        require_same_grid(u0.grid(), grid_, "initial_state");
        require_same_grid(x0.grid(), grid_, "initial_state");
        if (x0.components() != model_.d) throw GridMismatch("initial_state: gating block has wrong component count");
        if (!u0.all_finite() || !x0.all_finite()) throw DomainError("initial_state: non-finite initial data");
        SystemState s{0.0, 0, std::move(u0), std::move(x0), {}};
        s.mon.sup_u = s.u.sup_norm();
        s.mon.R = s.mon.sup_u + model_.declared.margin_R;
        for (double v : s.x.data()) s.mon.max_excursion = std::max(s.mon.max_excursion, unit_excursion(v));
        return s;
    }

    /// Advances by one step; `inc` may be null for a noise-free step.
    void step(SystemState& s, const NoiseIncrementSet* inc) {
        const std::size_t m = grid_.size();
        const std::size_t d = model_.d;
        const double dt = cfg_.dt;
        auto u = s.u.values();
        if (inc) require_same_grid(inc->grid(), grid_, "step");

        if (cfg_.track_regularity || cfg_.scheme == Scheme::Explicit) discrete_laplacian(u, lap_);
        if (cfg_.track_regularity) s.mon.au_energy += dt * weighted_norm_sq(lap_);

        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t i = 0; i < d; ++i) xk_[i] = s.x(i, k);
            rhs_[k] = u[k] + dt * model_.drift_u(u[k], xk_);
            for (std::size_t i = 0; i < d; ++i) x_next_(i, k) = xk_[i] + dt * model_.drift_gating(i, u[k], xk_[i]);
        }
        if (inc) {
            noise_u_.apply_add(inc->dB(), rhs_);
            if (gating_) {
                for (std::size_t i = 0; i < gating_->size(); ++i) {
                    gating_->apply_add(i, u, s.x, inc->dBi(i), x_next_.row(i));
                }
            }
        }
        if (cfg_.scheme == Scheme::SemiImplicit) {
            diffusion_->solve(rhs_);
        } else {
            for (std::size_t k = 0; k < m; ++k) rhs_[k] += dt * model_.nu * lap_[k];
        }

        // Left-endpoint weight increment uses the envelope before the update.
        s.mon.G += dt * model_.weight_integrand(s.mon.R);

        std::copy(rhs_.begin(), rhs_.end(), u.begin());
        std::swap(s.x, x_next_);
        ++s.step;
        s.t = static_cast<double>(s.step) * dt;

        if (!s.u.all_finite() || !s.x.all_finite()) {
            throw DivergenceError(s.step, "non-finite state in model '" + model_.name + "'");
        }
        for (std::size_t i = 0; i < d; ++i) {
            for (auto& v : s.x.row(i)) {
                s.mon.max_excursion = std::max(s.mon.max_excursion, unit_excursion(v));
                if (cfg_.clamp_gating) v = std::clamp(v, 0.0, 1.0);
            }
        }
        s.mon.sup_u = std::max(s.mon.sup_u, s.u.sup_norm());
        s.mon.R = s.mon.sup_u + model_.declared.margin_R;
    }

    void step(SystemState& s, const NoiseIncrementSet& inc) { step(s, &inc); }

private:
    ModelSpec model_;
    Grid1D grid_;
    SolverConfig cfg_;
    AdditiveNoiseOperator noise_u_;
    std::optional<ImplicitDiffusion> diffusion_;
    std::optional<GatingNoiseOperator> gating_;
    std::vector<double> rhs_;
    std::vector<double> lap_;
    std::vector<double> xk_;
    GatingBlock x_next_;
};

inline void record_snapshot(TrajectoryRecord& rec, const SystemState& s) {
    rec.t.push_back(s.t);
    rec.u.push_back(s.u);
    rec.x.push_back(s.x);
    rec.R.push_back(s.mon.R);
    rec.G.push_back(s.mon.G);
    rec.excursion.push_back(s.mon.max_excursion);
}

/// Full trajectory; snapshots at steps j with j % record_every == 0.
inline TrajectoryRecord simulate(const ModelSpec& model, const Grid1D& grid, const SolverConfig& cfg,
                                 const GridFunction& u0, const GatingBlock& x0, int quad_points = 4) {
    Stepper stepper(model, grid, cfg, quad_points);
    SystemState s = stepper.initial_state(u0, x0);
    TrajectoryRecord rec;
    record_snapshot(rec, s);
    const std::uint64_t steps = cfg.steps();
    const bool noisy = stepper.stochastic();
    for (std::uint64_t j = 0; j < steps; ++j) {
        if (noisy) {
            const auto inc = sample_increments(grid, model.d, cfg.dt, cfg.seed, j);
            stepper.step(s, inc);
        } else {
            stepper.step(s, nullptr);
        }
        if (s.step % cfg.record_every == 0) record_snapshot(rec, s);
    }
    rec.max_excursion = s.mon.max_excursion;
    rec.final_monitors = s.mon;
    return rec;
}

/// G at every snapshot by a left-endpoint sum of the weight integrand along the recorded envelope.
inline std::vector<double> compute_weight_G(const TrajectoryRecord& traj, const ModelSpec& model) {
    std::vector<double> G(traj.size(), 0.0);
    for (std::size_t j = 1; j < traj.size(); ++j) {
        G[j] = G[j - 1] + (traj.t[j] - traj.t[j - 1]) * model.weight_integrand(traj.R[j - 1]);
    }
    return G;
}

/// Grid sampling of initial data: u0(x) and x0_i(x).
inline GridFunction sample_initial_u(const std::function<double(double)>& u0, const Grid1D& grid) {
    return restrict_function(u0, grid);
}

inline GatingBlock sample_initial_x(const std::function<double(std::size_t, double)>& x0, const Grid1D& grid,
                                    std::size_t d) {
    GatingBlock x(grid, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < grid.size(); ++k) x(i, k) = x0(i, grid.point(k));
    }
    return x;
}

}  // namespace naxon
