#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace reglab {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Fixed-node rule on [lo, hi]: Gauss-Legendre panels of order at most 16,
// enough panels to reach at least `total_nodes` nodes.
struct QuadratureRule {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    double integrate(const std::function<double(double)>& f) const;
};

QuadratureRule composite_gauss_legendre(double lo, double hi, int total_nodes);

} // namespace reglab
