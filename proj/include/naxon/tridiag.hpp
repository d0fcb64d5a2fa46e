#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "naxon/errors.hpp"

namespace naxon {

struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Thomas elimination for a tridiagonal system.
 * lower[k] multiplies x[k-1] in row k (lower[0] unused), upper[k] multiplies
 * x[k+1] (upper[n-1] unused).
 */
inline std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                             std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t m = diag.size();
    if (lower.size() != m || upper.size() != m || rhs.size() != m) {
        throw std::invalid_argument("solve_tridiagonal: size mismatch");
    }
    std::vector<double> c(m), x(m);
    double pivot = diag[0];
    if (pivot == 0.0) throw SingularSystem("solve_tridiagonal: zero pivot in row 0");
    c[0] = m > 1 ? upper[0] / pivot : 0.0;
    x[0] = rhs[0] / pivot;
    for (std::size_t k = 1; k < m; ++k) {
        pivot = diag[k] - lower[k] * c[k - 1];
        if (pivot == 0.0) throw SingularSystem("solve_tridiagonal: zero pivot in row " + std::to_string(k));
        c[k] = k + 1 < m ? upper[k] / pivot : 0.0;
        x[k] = (rhs[k] - lower[k] * x[k - 1]) / pivot;
    }
    for (std::size_t k = m - 1; k-- > 0;) x[k] -= c[k] * x[k + 1];
    return x;
}

/**
 * Factored (I - tau * A^n) for the Neumann discrete Laplacian, tau = dt * nu.
 * The matrix is strictly diagonally dominant for tau > 0, so elimination
 * without pivoting is stable; the factorization is reused every step.
 */
class ImplicitDiffusion {
public:
    ImplicitDiffusion(std::size_t n, double tau) : lower_(n + 1), inv_pivot_(n + 1), c_(n + 1) {
        if (n < 2) throw InvalidGrid("ImplicitDiffusion: need n >= 2");
        if (!(tau > 0.0)) throw DomainError("ImplicitDiffusion: dt * nu must be positive");
        const double a = tau * static_cast<double>(n) * static_cast<double>(n);
        std::vector<double> diag(n + 1, 1.0 + 2.0 * a), upper(n + 1, -a);
        lower_.assign(n + 1, -a);
        upper[0] = -2.0 * a;
        lower_[n] = -2.0 * a;
        double pivot = diag[0];
        inv_pivot_[0] = 1.0 / pivot;
        c_[0] = upper[0] * inv_pivot_[0];
        for (std::size_t k = 1; k <= n; ++k) {
            pivot = diag[k] - lower_[k] * c_[k - 1];
            if (pivot == 0.0) throw SingularSystem("ImplicitDiffusion: zero pivot");
            inv_pivot_[k] = 1.0 / pivot;
            c_[k] = k < n ? upper[k] * inv_pivot_[k] : 0.0;
        }
    }

    /// Solves in place: rhs on entry, solution on exit.
    void solve(std::span<double> x) const noexcept {
        const std::size_t m = x.size();
        x[0] *= inv_pivot_[0];
        for (std::size_t k = 1; k < m; ++k) x[k] = (x[k] - lower_[k] * x[k - 1]) * inv_pivot_[k];
        for (std::size_t k = m - 1; k-- > 0;) x[k] -= c_[k] * x[k + 1];
    }

private:
    std::vector<double> lower_;
    std::vector<double> inv_pivot_;
    std::vector<double> c_;
};

}  // namespace naxon
