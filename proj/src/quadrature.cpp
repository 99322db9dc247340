#include "cspec/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cspec {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= n; ++m) {
                const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 1 ? x : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        if (n == 1) {
            x = 0.0;
            dp = 1.0;
        }
        r.nodes[n - 1 - i] = x;
        r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

CompositeRule composite_gauss(double a, double b, int panels, int n) {
    if (panels < 1) throw std::invalid_argument("composite_gauss: panels must be >= 1");
    const GaussRule g = gauss_legendre(n);
    CompositeRule c;
    c.nodes.reserve(std::size_t(panels) * n);
    c.weights.reserve(std::size_t(panels) * n);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < n; ++i) {
            c.nodes.push_back(lo + 0.5 * h * (g.nodes[i] + 1.0));
            c.weights.push_back(0.5 * h * g.weights[i]);
        }
    }
    return c;
}

std::vector<std::vector<double>> gauss_integration_matrix(const GaussRule& rule) {
    const int n = int(rule.nodes.size());
    const auto& x = rule.nodes;
    auto lagrange = [&](int j, double s) {
        double v = 1.0;
        for (int m = 0; m < n; ++m)
            if (m != j) v *= (s - x[m]) / (x[j] - x[m]);
        return v;
    };
    // Exact for the degree n-1 integrands.
    const GaussRule inner = gauss_legendre(n);
    std::vector<std::vector<double>> S(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        const double half = 0.5 * (x[i] + 1.0);
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int q = 0; q < n; ++q) acc += inner.weights[q] * lagrange(j, -1.0 + half * (inner.nodes[q] + 1.0));
            S[i][j] = half * acc;
        }
    }
    return S;
}

}  // namespace cspec
