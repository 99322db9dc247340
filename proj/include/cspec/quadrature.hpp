#pragma once

#include <vector>

namespace cspec {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Composite rule on [a, b]: `panels` equal panels with an n-point Gauss rule each.
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

CompositeRule composite_gauss(double a, double b, int panels, int n);

// S[i][j] = int_{-1}^{x_i} l_j(s) ds for the Lagrange basis on the rule's nodes.
std::vector<std::vector<double>> gauss_integration_matrix(const GaussRule& rule);

}  // namespace cspec
