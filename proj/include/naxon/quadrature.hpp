#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace naxon {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// Newton iteration on the Legendre recurrence; accurate to machine precision for order <= 64.
inline GaussRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = order * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        rule.nodes[order - 1 - i] = z;
        rule.weights[order - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return rule;
}

/// Composite Gauss rule on [a, b] split into `panels` equal pieces.
template <typename F>
double integrate(F&& f, double a, double b, int panels, const GaussRule& rule) {
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            sum += rule.weights[q] * f(mid + 0.5 * h * rule.nodes[q]);
        }
    }
    return 0.5 * h * sum;
}

/// Tensor composite Gauss rule over [a,b] x [c,d].
template <typename F>
double integrate_2d(F&& f, double a, double b, double c, double d, int panels, const GaussRule& rule) {
    const double hx = (b - a) / panels;
    const double hy = (d - c) / panels;
    double sum = 0.0;
    for (int px = 0; px < panels; ++px) {
        const double mx = a + (px + 0.5) * hx;
        for (std::size_t qx = 0; qx < rule.size(); ++qx) {
            const double x = mx + 0.5 * hx * rule.nodes[qx];
            double inner = 0.0;
            for (int py = 0; py < panels; ++py) {
                const double my = c + (py + 0.5) * hy;
                for (std::size_t qy = 0; qy < rule.size(); ++qy) {
                    inner += rule.weights[qy] * f(x, my + 0.5 * hy * rule.nodes[qy]);
                }
            }
            sum += rule.weights[qx] * inner;
        }
    }
    return 0.25 * hx * hy * sum;
}

}  // namespace naxon
