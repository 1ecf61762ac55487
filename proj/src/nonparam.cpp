#include "reglab/nonparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reglab {

std::string to_string(Divergence d) { return d == Divergence::Kl ? "kl" : "js"; }

DensitySpec::DensitySpec(double lo, double hi, std::function<double(double)> pdf,
                         int quad_nodes)
    : pdf_(std::move(pdf)) {
    if (quad_nodes < 1) {
        throw InvalidInput("DensitySpec: quad_nodes must be >= 1");
    }
    rule_ = composite_gauss_legendre(lo, hi, quad_nodes);
    CompensatedSum mass;
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
        const double p = pdf_(rule_.nodes[i]);
        if (!(p >= 0.0)) {
            throw InvalidInput("DensitySpec: pdf must be nonnegative on the support");
        }
        mass.add(rule_.weights[i] * p);
    }
    if (std::abs(mass.value() - 1.0) > 1e-8) {
        throw InvalidInput("DensitySpec: pdf does not integrate to 1 within 1e-8");
    }
}

DensitySpec DensitySpec::uniform(double lo, double hi, int quad_nodes) {
    const double height = 1.0 / (hi - lo);
    return DensitySpec(lo, hi, [height](double) { return height; }, quad_nodes);
}

EnergySpec1D EnergySpec1D::linear(double slope, double intercept, double lo, double hi) {
    const double at_lo = slope * lo + intercept;
    const double at_hi = slope * hi + intercept;
    return {[slope, intercept](double x) { return slope * x + intercept; },
            std::min(at_lo, at_hi), std::max(at_lo, at_hi)};
}

EnergySpec1D EnergySpec1D::tabulated(std::vector<double> xs, std::vector<double> values) {
    if (xs.size() != values.size() || xs.size() < 2) {
        throw InvalidInput("EnergySpec1D::tabulated: need >= 2 matching (x, value) pairs");
    }
    if (!std::is_sorted(xs.begin(), xs.end())) {
        throw InvalidInput("EnergySpec1D::tabulated: xs must be sorted ascending");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    auto eval = [xs = std::move(xs), values = std::move(values)](double x) {
        if (x <= xs.front()) {
            return values.front();
        }
        if (x >= xs.back()) {
            return values.back();
        }
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return values[i - 1] + t * (values[i] - values[i - 1]);
    };
    return {std::move(eval), lo, hi};
}

double weight(Divergence div, double alpha, double lambda, double energy_value) {
    const double t = alpha + lambda * energy_value;
    if (!(t > 0.0)) {
        throw InfeasibleAlpha("weight: alpha + lambda * energy must be positive");
    }
    if (div == Divergence::Kl) {
        return 1.0 / t;
    }
    return 1.0 / std::expm1(t);
}

namespace {

struct SolveTables {
    std::vector<double> mass;   // quadrature weight * p_d at each node
    std::vector<double> energy; // energy at each node
};

SolveTables build_tables(const DensitySpec& density, const EnergySpec1D& energy,
                         const QuadratureRule& rule) {
    SolveTables t;
    t.mass.resize(rule.nodes.size());
    t.energy.resize(rule.nodes.size());
    const double span = std::max(1.0, energy.max_bound - energy.min_bound);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes[i];
        t.mass[i] = rule.weights[i] * density.pdf(x);
        const double e = energy.eval(x);
        if (e < energy.min_bound - 1e-9 * span || e > energy.max_bound + 1e-9 * span) {
            throw InvalidInput("energy value escapes the declared [min_bound, max_bound]");
        }
        t.energy[i] = e;
    }
    return t;
}

double residual_from_tables(const SolveTables& t, Divergence div, double alpha,
                            double lambda) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < t.mass.size(); ++i) {
        const double arg = alpha + lambda * t.energy[i];
        const double w = div == Divergence::Kl ? 1.0 / arg : 1.0 / std::expm1(arg);
        acc.add(t.mass[i] * w);
    }
    return acc.value() - 1.0;
}

// Root of the residual by doubling bracket + bisection; |root - alpha*| <= tol.
double bisect_alpha(const SolveTables& tables, Divergence div, double lambda,
                    double min_bound, double tol) {
    const double alpha_min = -lambda * min_bound;
    const double eps = 1e-12 * (1.0 + std::abs(alpha_min));
    double lo = alpha_min + eps;

    const double r_lo = residual_from_tables(tables, div, lo, lambda);
    if (r_lo == 0.0) {
        return lo;
    }
    if (r_lo < 0.0) {
        throw NoFeasibleRoot(
            "solve_alpha: residual is negative at the feasibility boundary; no root on the feasible ray");
    }

    double step = 1.0;
    double hi = lo + step;
    int guard = 0;
    while (residual_from_tables(tables, div, hi, lambda) > 0.0) {
        lo = hi;
        step *= 2.0;
        hi = alpha_min + eps + step;
        if (++guard > 200) {
            throw NoFeasibleRoot("solve_alpha: residual never became negative while expanding the bracket");
        }
    }

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break; // bracket at floating-point resolution
        }
        if (residual_from_tables(tables, div, mid, lambda) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

double normalization_residual(const DensitySpec& density, const EnergySpec1D& energy,
                              Divergence div, double alpha, double lambda) {
    if (!(alpha > -lambda * energy.min_bound)) {
        throw InfeasibleAlpha("normalization_residual: alpha outside the feasible ray");
    }
    const SolveTables tables = build_tables(density, energy, density.rule());
    return residual_from_tables(tables, div, alpha, lambda);
}

SolveResult solve_alpha(const DensitySpec& density, const EnergySpec1D& energy,
                        Divergence div, double lambda, double tol, int grid_points) {
    if (!(lambda > 0.0)) {
        throw InvalidInput("solve_alpha: lambda must be positive");
    }
    if (!(tol > 0.0)) {
        throw InvalidInput("solve_alpha: tol must be positive");
    }
    if (grid_points < 2) {
        throw InvalidInput("solve_alpha: grid_points must be >= 2");
    }

    const SolveTables tables = build_tables(density, energy, density.rule());
    const double alpha = bisect_alpha(tables, div, lambda, energy.min_bound, tol);

    // Refinement check: the root must be stable under doubling the node count.
    {
        const QuadratureRule fine = composite_gauss_legendre(
            density.lo(), density.hi(), 2 * density.quad_nodes());
        const SolveTables fine_tables = build_tables(density, energy, fine);
        const double alpha_fine =
            bisect_alpha(fine_tables, div, lambda, energy.min_bound, tol);
        if (std::abs(alpha_fine - alpha) > 10.0 * tol) {
            throw QuadratureUnstable(
                "solve_alpha: doubling quad_nodes moved alpha* by more than 10 * tol");
        }
    }

    SolveResult result;
    result.divergence = div;
    result.lambda = lambda;
    result.alpha_star = alpha;
    result.residual = residual_from_tables(tables, div, alpha, lambda);

    result.grid_x.resize(grid_points);
    result.grid_pd.resize(grid_points);
    result.grid_energy.resize(grid_points);
    result.grid_weight.resize(grid_points);
    result.grid_pg.resize(grid_points);
    const double lo = density.lo();
    const double hi = density.hi();
    for (int i = 0; i < grid_points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1);
        const double pd = density.pdf(x);
        const double e = energy.eval(x);
        const double w = weight(div, alpha, lambda, e);
        result.grid_x[i] = x;
        result.grid_pd[i] = pd;
        result.grid_energy[i] = e;
        result.grid_weight[i] = w;
        result.grid_pg[i] = pd * w;
    }
    return result;
}

WeightRange weight_range(const SolveResult& result) {
    if (result.grid_weight.empty()) {
        throw InvalidInput("weight_range: empty solve grid");
    }
    const auto [lo_it, hi_it] =
        std::minmax_element(result.grid_weight.begin(), result.grid_weight.end());
    return {*lo_it, *hi_it, *hi_it / *lo_it};
}

} // namespace reglab
