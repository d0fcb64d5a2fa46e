#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "catch_amalgamated.hpp"
#include "dense_oracle.hpp"
#include "naxon/noise.hpp"
#include "naxon/ou.hpp"

using namespace naxon;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

// Closed-form cell average of cos(pi x) over [a, b].
double cos_avg(double a, double b) { return (std::sin(pi * b) - std::sin(pi * a)) / (pi * (b - a)); }

CovarianceKernel cosine() { return make_kernel({"cosine", 1.0, 0.1}); }

}  // namespace

TEST_CASE("kernel construction") {
    CHECK(make_kernel({"zero", 1.0, 0.1}).is_zero());
    const auto c = cosine();
    CHECK(c.w12_norm_sq() == Approx(0.25 + 0.5 * pi * pi));
    CHECK(c.l2_norm_sq() == Approx(0.25).epsilon(1e-8));
    const auto g = make_kernel({"gaussian_bump", 1.0, 0.2});
    CHECK(g(0.3, 0.7) == Approx(g(0.7, 0.3)));
    CHECK(g.w12_norm_sq() >= g.l2_norm_sq());
    CHECK_THROWS_AS(make_kernel({"nope", 1.0, 0.1}), DomainError);
    CHECK_THROWS_AS(CovarianceKernel("nan", [](double, double) { return std::nan(""); }), ConstructionError);
}

TEST_CASE("discretize_kernel examples") {
    const auto c = discretize_kernel(make_kernel({"constant", 2.5, 0.1}), Grid1D(5));
    for (std::size_t k = 0; k <= 5; ++k) {
        for (std::size_t l = 0; l <= 5; ++l) CHECK(c(k, l) == Approx(2.5));
    }

    // Separable x * y^2: product of closed-form cell averages.
    const CovarianceKernel sep("sep", [](double x, double y) { return x * y * y; });
    const Grid1D g(4);
    const auto s = discretize_kernel(sep, g);
    for (std::size_t k = 0; k <= 4; ++k) {
        for (std::size_t l = 0; l <= 4; ++l) {
            const double a = g.cell_lo(k), b = g.cell_hi(k), p = g.cell_lo(l), q = g.cell_hi(l);
            const double ax = 0.5 * (a + b);
            const double ay = (q * q * q - p * p * p) / (3.0 * (q - p));
            CHECK(s(k, l) == Approx(ax * ay).epsilon(1e-12));
        }
    }

    // Higher quadrature order so the closed forms hold to 1e-12.
    const auto c2 = discretize_kernel(cosine(), Grid1D(2), 10);
    CHECK(c2(0, 0) == Approx(8.0 / (pi * pi)).epsilon(1e-12));
    CHECK(std::abs(c2(1, 1)) < 1e-14);
    CHECK(c2(0, 2) == Approx(-8.0 / (pi * pi)).epsilon(1e-12));
    const auto c3 = discretize_kernel(cosine(), Grid1D(3), 10);
    CHECK(c3(0, 1) == Approx(4.5 / (pi * pi)).epsilon(1e-12));
    const Grid1D g9(9);
    const auto c9 = discretize_kernel(cosine(), g9);
    for (std::size_t k = 0; k <= 9; ++k) {
        for (std::size_t l = 0; l <= 9; ++l) {
            const double e = cos_avg(g9.cell_lo(k), g9.cell_hi(k)) * cos_avg(g9.cell_lo(l), g9.cell_hi(l));
            CHECK(c9(k, l) == Approx(e).margin(1e-12));
        }
    }
}

TEST_CASE("Hilbert-Schmidt discretization error is within 2 ||b||^2 / n^2") {
    const auto b = cosine();
    double prev = INFINITY;
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
        const double e = hs_discretization_error_sq(b, discretize_kernel(b, Grid1D(n)));
        CHECK(e <= 2.0 * b.w12_norm_sq() / static_cast<double>(n * n));
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("increments: moments, determinism, errors") {
    const Grid1D g(2);
    const double dt = 0.01;
    const int N = 100000;
    double s = 0, ss = 0;
    for (int j = 0; j < N; ++j) {
        const auto inc = sample_increments(g, 1, dt, 42, static_cast<std::uint64_t>(j));
        const double v = inc.dBi(0)[1];
        s += v;
        ss += v * v;
    }
    const double mean = s / N;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(dt / N));
    CHECK(std::abs((ss / N - mean * mean) / dt - 1.0) < 0.05);

    const auto a = sample_increments(Grid1D(16), 3, dt, 7, 5);
    const auto b = sample_increments(Grid1D(16), 3, dt, 7, 5);
    const auto c = sample_increments(Grid1D(16), 3, dt, 8, 5);
    for (std::size_t comp = 0; comp <= 3; ++comp) {
        CHECK(std::equal(a.raw(comp).begin(), a.raw(comp).end(), b.raw(comp).begin()));
        CHECK(!std::equal(a.raw(comp).begin(), a.raw(comp).end(), c.raw(comp).begin()));
    }
    CHECK_THROWS_AS(sample_increments(g, 1, 0.0, 1, 0), DomainError);
    CHECK_THROWS_AS(sample_increments(g, 1, -1.0, 1, 0), DomainError);
}

TEST_CASE("standard normals pass a Kolmogorov-Smirnov test") {
    const int N = 100000;
    std::vector<double> z(N);
    for (int j = 0; j < N; ++j) z[j] = standard_normal({99, 0, static_cast<std::uint64_t>(j), 3});
    std::sort(z.begin(), z.end());
    double D = 0.0;
    for (int j = 0; j < N; ++j) {
        const double F = 0.5 * std::erfc(-z[j] / std::sqrt(2.0));
        D = std::max({D, std::abs(F - static_cast<double>(j) / N), std::abs(F - static_cast<double>(j + 1) / N)});
    }
    // 0.1% critical value
    CHECK(D < 1.95 / std::sqrt(static_cast<double>(N)));
}

TEST_CASE("aggregation examples") {
    const std::size_t nf = 27;
    const auto fine = sample_increments(Grid1D(nf), 1, 1e-3, 5, 0);
    const auto coarse = aggregate_increments(fine, 3);
    REQUIRE(coarse.grid().n() == 9);
    const auto f = fine.dB();
    const auto c = coarse.dB();
    CHECK(c[4] == Approx((f[11] + f[12] + f[13]) / std::sqrt(3.0)).epsilon(1e-12));
    const double nc = 9.0;
    const double boundary = (f[0] * std::sqrt(1.0 / (2.0 * nf)) + f[1] * std::sqrt(1.0 / nf)) * std::sqrt(2.0 * nc);
    CHECK(c[0] == Approx(boundary).epsilon(1e-12));
    CHECK(c[9] == Approx((f[27] * std::sqrt(1.0 / (2.0 * nf)) + f[26] * std::sqrt(1.0 / nf)) * std::sqrt(2.0 * nc))
                      .epsilon(1e-12));

    const auto fine81 = sample_increments(Grid1D(81), 2, 1e-3, 5, 3);
    const auto twice = aggregate_increments(aggregate_increments(fine81, 3), 3);
    const auto once = aggregate_increments(fine81, 9);
    for (std::size_t comp = 0; comp <= 2; ++comp) {
        CHECK(std::equal(twice.raw(comp).begin(), twice.raw(comp).end(), once.raw(comp).begin()));
    }
    CHECK(std::equal(twice.dBi(1).begin(), twice.dBi(1).end(), once.dBi(1).begin()));

    CHECK_THROWS_AS(aggregate_increments(fine, 2), DomainError);
    CHECK_THROWS_AS(aggregate_increments(sample_increments(Grid1D(20), 0, 1e-3, 1, 0), 3), DomainError);
    CHECK_THROWS_AS(aggregate_increments(sample_increments(Grid1D(3), 0, 1e-3, 1, 0), 3), InvalidGrid);
}

TEST_CASE("apply_additive_noise examples") {
    const Grid1D g(2);
    const auto ones = discretize_kernel(make_kernel({"constant", 1.0, 0.1}), g);
    auto inc = sample_increments(g, 0, 0.1, 3, 0);
    const auto out = apply_additive_noise(ones, inc);
    const auto dB = inc.dB();
    const double expect = 0.5 * (dB[0] + dB[2]) + dB[1] / std::sqrt(2.0);
    for (std::size_t k = 0; k <= 2; ++k) CHECK(out[k] == Approx(expect).epsilon(1e-14));

    inc.set_zero();
    const auto zero = apply_additive_noise(ones, inc);
    for (double v : zero.values()) CHECK(v == 0.0);

    const Grid1D g8(8);
    const auto cov = discretize_kernel(make_kernel({"gaussian_bump", 1.0, 0.2}), g8);
    auto i8 = sample_increments(g8, 0, 0.1, 4, 0);
    const auto base = apply_additive_noise(cov, i8);
    i8.scale(2.0);
    const auto doubled = apply_additive_noise(cov, i8);
    for (std::size_t k = 0; k <= 8; ++k) CHECK(doubled[k] == Approx(2.0 * base[k]).epsilon(1e-14));

    CHECK_THROWS_AS(apply_additive_noise(cov, sample_increments(Grid1D(4), 0, 0.1, 4, 0)), GridMismatch);
}

TEST_CASE("gating noise matrix examples") {
    const Grid1D g(6);
    const auto c = cosine();
    const auto gk = product_gating_kernel({0.3, 0.7}, c);
    GridFunction u(g);
    GatingBlock x(g, 2);
    for (std::size_t k = 0; k <= 6; ++k) {
        x(0, k) = 0.5;
        x(1, k) = 0.5;
    }
    const auto avg = discretize_kernel(c, g);
    auto mats = gating_noise_matrix(gk, u, x);
    for (std::size_t k = 0; k <= 6; ++k) {
        for (std::size_t l = 0; l <= 6; ++l) {
            CHECK(mats[0](k, l) == Approx(0.3 / 4.0 * avg(k, l)).margin(1e-14));
            CHECK(mats[1](k, l) == Approx(0.7 / 4.0 * avg(k, l)).margin(1e-14));
        }
    }

    for (double edge : {0.0, 1.0}) {
        for (std::size_t k = 0; k <= 6; ++k) x(0, k) = edge;
        mats = gating_noise_matrix(gk, u, x);
        for (std::size_t k = 0; k <= 6; ++k) {
            for (std::size_t l = 0; l <= 6; ++l) CHECK(mats[0](k, l) == 0.0);
        }
    }

    // 1.5 on the whole of cell 3 (nodes 2..4) zeroes that row of component 0 only.
    for (std::size_t k = 0; k <= 6; ++k) x(0, k) = 0.5;
    for (std::size_t k = 2; k <= 4; ++k) x(0, k) = 1.5;
    mats = gating_noise_matrix(gk, u, x);
    for (std::size_t l = 0; l <= 6; ++l) CHECK(mats[0](3, l) == 0.0);
    CHECK(mats[0](0, 0) != 0.0);
    CHECK(mats[1](2, 0) != 0.0);
}

TEST_CASE("gating operator matches the matrix form") {
    const Grid1D g(10);
    const auto gk = product_gating_kernel({0.4}, make_kernel({"gaussian_bump", 1.0, 0.3}));
    GridFunction u(g);
    GatingBlock x(g, 1);
    for (std::size_t k = 0; k <= 10; ++k) x(0, k) = 0.1 + 0.08 * k;
    const auto inc = sample_increments(g, 1, 0.01, 9, 0);
    const auto mat = gating_noise_matrix(gk, u, x)[0];
    std::vector<double> out(11, 0.0);
    GatingNoiseOperator(gk, g).apply_add(0, u.values(), x, inc.dBi(0), out);
    for (std::size_t k = 0; k <= 10; ++k) {
        double e = 0.0;
        for (std::size_t l = 0; l <= 10; ++l) e += mat(k, l) * std::sqrt(g.cell_width(l)) * inc.dBi(0)[l];
        CHECK(out[k] == Approx(e).margin(1e-14));
    }
}

TEST_CASE("discrete OU: zero kernel gives a zero path") {
    const auto cov = discretize_kernel(make_kernel({"zero", 1.0, 0.1}), Grid1D(8));
    const auto p = simulate_discrete_ou(cov, 0.01, 0.1, 1, 1.0, true);
    CHECK(p.xi == 0.0);
    CHECK(p.path.size() == 11);
    for (const auto& y : p.path) CHECK(y.sup_norm() == 0.0);
    CHECK_THROWS_AS(simulate_discrete_ou(cov, 0.0, 1.0, 1), DomainError);
}

TEST_CASE("discrete OU variance matches the discrete Lyapunov recursion") {
    const std::size_t n = 8;
    const Grid1D g(n);
    const double dt = 2e-3, T = 0.5;
    const auto cov = discretize_kernel(cosine(), g);
    const std::size_t m = n + 1;

    // M = (I - dt A)^{-1}, G_kl = b_kl |I_l|^{1/2}; C+ = M (C + dt G G^T) M^T.
    auto A = oracle::laplacian(n);
    auto lhs = oracle::identity(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) lhs[i][j] -= dt * A[i][j];
    }
    const auto M = oracle::solve(lhs, oracle::identity(m));
    oracle::Matrix G(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) G[i][j] = cov(i, j) * std::sqrt(g.cell_width(j));
    }
    const auto GG = oracle::multiply(G, oracle::transpose(G));
    oracle::Matrix C(m, std::vector<double>(m, 0.0));
    const auto Mt = oracle::transpose(M);
    const int steps = static_cast<int>(std::floor(T / dt + 1e-9));
    for (int s = 0; s < steps; ++s) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) C[i][j] += dt * GG[i][j];
        }
        C = oracle::multiply(oracle::multiply(M, C), Mt);
    }

    const int paths = 4000;
    std::vector<double> s2(m, 0.0);
    for (int p = 0; p < paths; ++p) {
        const auto y = simulate_discrete_ou(cov, dt, T, derive_seed(17, static_cast<std::uint64_t>(p))).final_state;
        for (std::size_t k = 0; k < m; ++k) s2[k] += y[k] * y[k];
    }
    double cmax = 0.0;
    for (std::size_t k = 0; k < m; ++k) cmax = std::max(cmax, C[k][k]);
    for (std::size_t k = 0; k < m; ++k) {
        if (C[k][k] < 0.2 * cmax) continue;
        CHECK(std::abs(s2[k] / paths / C[k][k] - 1.0) < 0.10);
    }
}
