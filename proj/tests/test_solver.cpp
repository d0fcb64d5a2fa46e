#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "dense_oracle.hpp"
#include "naxon/solver.hpp"

using namespace naxon;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

const NoiseSpec kQuiet{{"zero", 1.0, 0.1}, {"zero", 1.0, 0.1}, false};

// f(u) = sum_j poly[j] u^j, one inert gating component.
ModelSpec poly_model(std::vector<double> poly, KernelSpec u_kernel = {"zero", 1.0, 0.1}) {
    CustomParams p;
    p.poly_u = std::move(poly);
    return make_custom_model(p, NoiseSpec{u_kernel, {"zero", 1.0, 0.1}, false});
}

GatingBlock constant_x(const Grid1D& g, std::size_t d, double v) {
    return sample_initial_x([v](std::size_t, double) { return v; }, g, d);
}

HHParams hh_with_sigma(double sigma) {
    HHParams p;
    for (auto& g : p.gates) g.sigma = sigma;
    return p;
}

GatingBlock hh_rest(const Grid1D& g, const HHParams& p) {
    return sample_initial_x([&](std::size_t i, double) { return hh_steady_state(-65.0, static_cast<Gate>(i), p); }, g, 3);
}

double hh_excursion(double dt, double sigma, bool gating_noise, std::uint64_t seed, std::size_t n, double T) {
    const HHParams p = hh_with_sigma(sigma);
    NoiseSpec ns;
    ns.gating_noise = gating_noise;
    const Grid1D g(n);
    SolverConfig c;
    c.dt = dt;
    c.T = T;
    c.seed = seed;
    c.record_every = 1u << 30;
    return simulate(make_hh_model(p, ns), g, c, sample_initial_u([](double) { return -65.0; }, g), hh_rest(g, p))
        .max_excursion;
}

}  // namespace

TEST_CASE("config validation names the offending key") {
    SolverConfig c;
    c.dt = 0.0;
    try {
        c.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "dt");
    }
    c.dt = 0.1;
    c.T = 0.01;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.T = 1.0;
    c.record_every = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.record_every = 1;
    c.dt = 0.1;
    CHECK(c.steps() == 10);
}

TEST_CASE("tridiagonal solver examples") {
    const std::vector<double> rhs{1.0, 2.0, 3.0, 4.0};
    const auto id = solve_tridiagonal(std::vector<double>(4, 0.0), std::vector<double>(4, 1.0),
                                      std::vector<double>(4, 0.0), rhs);
    CHECK(id == rhs);

    const std::vector<double> lower{0.0, -1.0, -2.0}, diag{3.0, 3.0, 3.0}, upper{-2.0, -1.0, 0.0}, b{1.0, 1.0, 1.0};
    const auto x = solve_tridiagonal(lower, diag, upper, b);
    const auto ref = oracle::solve({{3, -2, 0}, {-1, 3, -1}, {0, -2, 3}}, {1.0, 1.0, 1.0});
    for (int i = 0; i < 3; ++i) CHECK(x[i] == Approx(ref[i]).epsilon(1e-14));
    // Same matrix as I - dt nu A^2 with dt nu n^2 = 1.
    std::vector<double> y{1.0, 1.0, 1.0};
    ImplicitDiffusion(2, 0.25).solve(y);
    for (int i = 0; i < 3; ++i) CHECK(y[i] == Approx(ref[i]).epsilon(1e-14));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1, 1);
    const std::size_t m = 513;
    std::vector<double> lo(m), di(m), up(m), r(m);
    for (std::size_t k = 0; k < m; ++k) {
        lo[k] = U(rng);
        up[k] = U(rng);
        di[k] = 2.5 + std::abs(U(rng));
        r[k] = U(rng);
    }
    const auto s = solve_tridiagonal(lo, di, up, r);
    double res = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double v = di[k] * s[k] - r[k];
        if (k > 0) v += lo[k] * s[k - 1];
        if (k + 1 < m) v += up[k] * s[k + 1];
        res = std::max(res, std::abs(v));
    }
    CHECK(res < 1e-13);
    CHECK_THROWS_AS(solve_tridiagonal(lo, di, up, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("constant u without drift or noise stays constant") {
    const Grid1D g(32);
    SolverConfig c;
    c.dt = 1e-3;
    c.T = 0.1;
    const auto u0 = sample_initial_u([](double) { return 3.25; }, g);
    const auto rec = simulate(poly_model({0.0}), g, c, u0, constant_x(g, 1, 0.5));
    for (double v : rec.u.back().values()) CHECK(v == Approx(3.25).epsilon(1e-14));
}

TEST_CASE("one heat step matches a dense solve") {
    const std::size_t n = 128;
    const Grid1D g(n);
    SolverConfig c;
    c.dt = 1e-4;
    c.T = 1e-4;
    const auto u0 = sample_initial_u([](double x) { return std::cos(pi * x); }, g);
    const auto rec = simulate(make_heat_model(), g, c, u0, constant_x(g, 1, 0.0));
    auto M = oracle::identity(n + 1);
    const auto A = oracle::laplacian(n);
    for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = 0; j <= n; ++j) M[i][j] -= c.dt * A[i][j];
    }
    const auto ref = oracle::solve(M, std::vector<double>(u0.values().begin(), u0.values().end()));
    for (std::size_t k = 0; k <= n; ++k) CHECK(rec.u.back()[k] == Approx(ref[k]).margin(1e-10));
}

TEST_CASE("semi-implicit heat step is stable for any dt; explicit blows up past the limit") {
    const std::size_t n = 32;
    const Grid1D g(n);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1, 1);
    GridFunction u0(g);
    for (auto& v : u0.values()) v = U(rng);

    SolverConfig c;
    c.dt = 0.1;
    c.T = 5.0;
    const auto imp = simulate(make_heat_model(), g, c, u0, constant_x(g, 1, 0.0));
    for (std::size_t j = 1; j < imp.size(); ++j) CHECK(imp.u[j].sup_norm() <= imp.u[j - 1].sup_norm() + 1e-14);

    // Stability limit 2 / (4 n^2 nu) ~ 4.9e-4.
    c.dt = 1e-3;
    c.T = 0.5;
    c.scheme = Scheme::Explicit;
    bool amplified = false;
    try {
        const auto ex = simulate(make_heat_model(), g, c, u0, constant_x(g, 1, 0.0));
        amplified = ex.u.back().sup_norm() > 1e6 * u0.sup_norm();
    } catch (const DivergenceError&) {
        amplified = true;
    }
    CHECK(amplified);

    c.dt = 4e-4;
    const auto ok = simulate(make_heat_model(), g, c, u0, constant_x(g, 1, 0.0));
    CHECK(ok.u.back().sup_norm() <= u0.sup_norm());
}

TEST_CASE("FHN with constant data follows the ODE") {
    const FHNParams p;
    // RK4 oracle for the spatially constant solution.
    auto rhs = [&](const std::array<double, 2>& s) {
        const auto [du, dw] = fhn_drift(s[0], s[1], p);
        return std::array<double, 2>{du, dw};
    };
    std::array<double, 2> s{-1.0, 0.5};
    const double h = 1e-3;
    for (int j = 0; j < 10000; ++j) {
        const auto k1 = rhs(s);
        const auto k2 = rhs({s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1]});
        const auto k3 = rhs({s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1]});
        const auto k4 = rhs({s[0] + h * k3[0], s[1] + h * k3[1]});
        for (int i = 0; i < 2; ++i) s[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }

    const Grid1D g(4);
    SolverConfig c;
    c.dt = 2e-6;
    c.T = 10.0;
    c.record_every = c.steps();
    const auto rec = simulate(make_fhn_model(p, kQuiet), g, c, sample_initial_u([](double) { return -1.0; }, g),
                              constant_x(g, 1, 0.5));
    REQUIRE(rec.t.back() == Approx(10.0));
    for (std::size_t k = 0; k <= 4; ++k) {
        CHECK(std::abs(rec.u.back()[k] - s[0]) < 1e-4);
        CHECK(std::abs(rec.x.back()(0, k) - s[1]) < 1e-4);
    }
}

TEST_CASE("snapshot times are multiples of the stride") {
    const Grid1D g(8);
    SolverConfig c;
    c.dt = 0.01;
    c.T = 1.0;
    c.record_every = 7;
    const auto rec = simulate(poly_model({0.0, -1.0}, {"cosine", 1.0, 0.1}), g, c,
                              sample_initial_u([](double) { return 1.0; }, g), constant_x(g, 1, 0.0));
    REQUIRE(rec.size() == 1 + 100 / 7);
    for (std::size_t j = 0; j < rec.size(); ++j) CHECK(rec.t[j] == static_cast<double>(j * 7) * c.dt);
}

TEST_CASE("weight G: constant envelope and doubling") {
    CustomParams p;
    p.declared.L = 1.0;
    p.declared.r = 2.0;
    p.declared.rho0 = 0.0;
    const auto m = make_custom_model(p, kQuiet);
    TrajectoryRecord rec;
    for (int j = 0; j <= 20; ++j) {
        rec.t.push_back(0.05 * j);
        rec.R.push_back(0.0);
    }
    const auto G = compute_weight_G(rec, m);
    CHECK(G[0] == 0.0);
    CHECK(G[10] == Approx(8.0 * 0.5));
    CHECK(G[20] == Approx(2.0 * G[10]));
}

TEST_CASE("weight G: FHN left-endpoint sum against trapezoid recomputation and the monitor") {
    const auto m = make_fhn_model(FHNParams{}, NoiseSpec{});
    const Grid1D g(16);
    SolverConfig c;
    c.dt = 1e-3;
    c.T = 1.0;
    c.seed = 3;
    const auto rec = simulate(m, g, c, sample_initial_u([](double x) { return 0.5 * std::cos(pi * x); }, g),
                              constant_x(g, 1, 0.0));
    const auto G = compute_weight_G(rec, m);
    double trap = 0.0;
    for (std::size_t j = 1; j < rec.size(); ++j) {
        const double a = rec.R[j - 1], b = rec.R[j];
        trap += 0.5 * (rec.t[j] - rec.t[j - 1]) * ((4.0 * (1 + a * a * a * a) + 5.0) + (4.0 * (1 + b * b * b * b) + 5.0));
    }
    CHECK(G.back() == Approx(trap).epsilon(0.01));
    CHECK(G.back() == Approx(rec.final_monitors.G).epsilon(1e-12));
    for (std::size_t j = 1; j < G.size(); ++j) CHECK(G[j] >= G[j - 1]);
}

TEST_CASE("monitors bound the recorded states") {
    const auto m = make_fhn_model(FHNParams{}, NoiseSpec{});
    const Grid1D g(16);
    SolverConfig c;
    c.dt = 1e-3;
    c.T = 2.0;
    c.seed = 9;
    c.record_every = 5;
    const auto rec = simulate(m, g, c, sample_initial_u([](double) { return 0.2; }, g), constant_x(g, 1, 0.0));
    double sup = 0.0;
    for (std::size_t j = 0; j < rec.size(); ++j) {
        sup = std::max(sup, rec.u[j].sup_norm());
        CHECK(rec.R[j] >= sup + m.declared.margin_R - 1e-15);
        if (j > 0) CHECK(rec.R[j] >= rec.R[j - 1]);
    }
    CHECK(rec.final_monitors.sup_u >= sup);
}

TEST_CASE("increments enter linearly") {
    const auto m = poly_model({0.0}, {"cosine", 1.0, 0.1});
    const Grid1D g(16);
    SolverConfig c;
    c.dt = 1e-3;
    Stepper st(m, g, c);
    REQUIRE(st.stochastic());
    auto inc = sample_increments(g, 1, c.dt, 1, 0);
    auto a = st.initial_state(GridFunction(g), constant_x(g, 1, 0.0));
    auto b = a;
    st.step(a, inc);
    inc.scale(2.0);
    st.step(b, inc);
    for (std::size_t k = 0; k <= 16; ++k) CHECK(b.u[k] == Approx(2.0 * a.u[k]).margin(1e-15));
    CHECK(a.u.sup_norm() > 0.0);
}

TEST_CASE("initial state and divergence errors") {
    const auto m = poly_model({0.0, 0.0, 1.0});
    const Grid1D g(8);
    SolverConfig c;
    c.dt = 0.1;
    c.T = 10.0;
    Stepper st(m, g, c);
    CHECK_THROWS_AS(st.initial_state(GridFunction(g), constant_x(g, 2, 0.0)), GridMismatch);
    CHECK_THROWS_AS(st.initial_state(GridFunction(Grid1D(4)), constant_x(g, 1, 0.0)), GridMismatch);
    auto bad = GridFunction(g);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(st.initial_state(bad, constant_x(g, 1, 0.0)), DomainError);
    try {
        simulate(m, g, c, sample_initial_u([](double) { return 10.0; }, g), constant_x(g, 1, 0.0));
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.step() > 0);
        CHECK(e.step() <= c.steps());
    }
    CHECK_THROWS_AS(Stepper(m, Grid1D(1), c), InvalidGrid);
}

TEST_CASE("regularity proxy matches the heat-equation integral") {
    const Grid1D g(64);
    SolverConfig c;
    c.dt = 1e-5;
    c.T = 0.1;
    c.track_regularity = true;
    c.record_every = 1u << 30;
    const auto rec = simulate(make_heat_model(), g, c, sample_initial_u([](double x) { return std::cos(pi * x); }, g),
                              constant_x(g, 1, 0.0));
    // int_0^T |u_xx|^2 = (pi^4 / 2) (1 - e^{-2 pi^2 T}) / (2 pi^2)
    const double exact = pi * pi / 4.0 * (1.0 - std::exp(-2.0 * pi * pi * c.T));
    CHECK(rec.final_monitors.au_energy == Approx(exact).epsilon(0.01));
}

TEST_CASE("HH drift-only gating stays in [0,1]") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) CHECK(hh_excursion(1e-3, 0.1, false, seed, 16, 2.0) == 0.0);
}

TEST_CASE("HH gating-noise excursion shrinks with dt") {
    // Large channel noise so that Euler overshoots actually occur.
    double coarse = 0.0, fine = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        coarse += hh_excursion(4e-3, 20.0, true, seed, 16, 1.0);
        fine += hh_excursion(1e-3, 20.0, true, seed, 16, 1.0);
    }
    CHECK(coarse > 0.0);
    CHECK(fine < coarse);
}
