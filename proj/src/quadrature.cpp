#include "reglab/quadrature.hpp"

#include <cmath>

#include "reglab/common.hpp"

namespace reglab {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) {
        throw InvalidInput("gauss_legendre: node count must be >= 1");
    }
    std::vector<double> nodes(n);
    std::vector<double> weights(n);
    const double dn = static_cast<double>(n);
    const int half = (n + 1) / 2;
    constexpr double kPi = 3.14159265358979323846;

    for (int i = 1; i <= half; ++i) {
        // Newton iteration on P_n from the Chebyshev-based initial guess.
        double z = std::cos(kPi * (i - 0.25) / (dn + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = dn * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) {
                break;
            }
        }
        nodes[i - 1] = -z;
        nodes[n - i] = z;
        weights[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[n - i] = weights[i - 1];
    }
    return {std::move(nodes), std::move(weights)};
}

QuadratureRule composite_gauss_legendre(double lo, double hi, int total_nodes) {
    if (!(lo < hi)) {
        throw InvalidInput("composite_gauss_legendre: requires lo < hi");
    }
    if (total_nodes < 1) {
        throw InvalidInput("composite_gauss_legendre: requires total_nodes >= 1");
    }
    constexpr int kPanelOrder = 16;
    const int order = total_nodes < kPanelOrder ? total_nodes : kPanelOrder;
    const int panels = (total_nodes + order - 1) / order;

    const auto [ref_nodes, ref_weights] = gauss_legendre(order);
    QuadratureRule rule;
    rule.lo = lo;
    rule.hi = hi;
    rule.nodes.reserve(static_cast<std::size_t>(order) * panels);
    rule.weights.reserve(static_cast<std::size_t>(order) * panels);

    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * width;
        const double mid = a + 0.5 * width;
        const double halfw = 0.5 * width;
        for (int k = 0; k < order; ++k) {
            rule.nodes.push_back(mid + halfw * ref_nodes[k]);
            rule.weights.push_back(halfw * ref_weights[k]);
        }
    }
    return rule;
}

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        acc.add(weights[i] * f(nodes[i]));
    }
    return acc.value();
}

} // namespace reglab
