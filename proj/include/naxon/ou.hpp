#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "naxon/errors.hpp"
#include "naxon/grid.hpp"
#include "naxon/noise.hpp"
#include "naxon/tridiag.hpp"

namespace naxon {

struct OUPath {
    std::vector<GridFunction> path;  // empty unless requested
    double xi = 0.0;                 // sup over time and grid of |Y^n|
    GridFunction final_state;
};

/**
 * Semi-implicit Euler for dY = nu A^n Y dt + B^n dW, Y(0) = 0:
 * (I - dt nu A^n) Y+ = Y + G dB.
 */
inline OUPath simulate_discrete_ou(const DiscreteCovariance& cov, double dt, double T, std::uint64_t seed,
                                   double nu = 1.0, bool keep_path = false) {
    if (!(dt > 0.0)) throw DomainError("simulate_discrete_ou: dt must be positive");
    if (!(T >= dt)) throw DomainError("simulate_discrete_ou: need T >= dt");
    const Grid1D grid = cov.grid();
    const AdditiveNoiseOperator G(cov);
    const ImplicitDiffusion solver(grid.n(), dt * nu);
    const auto steps = static_cast<std::uint64_t>(std::floor(T / dt + 1e-9));
    OUPath out{{}, 0.0, GridFunction(grid)};
    auto y = out.final_state.values();
    if (keep_path) out.path.push_back(out.final_state);
    if (G.is_zero()) {
        if (keep_path) out.path.assign(steps + 1, out.final_state);
        return out;
    }
    for (std::uint64_t j = 0; j < steps; ++j) {
        const auto inc = sample_increments(grid, 0, dt, seed, j);
        G.apply_add(inc.dB(), y);
        solver.solve(y);
        for (double v : y) out.xi = std::max(out.xi, std::abs(v));
        if (keep_path) out.path.push_back(out.final_state);
    }
    return out;
}

}  // namespace naxon
