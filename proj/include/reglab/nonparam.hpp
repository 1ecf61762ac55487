#pragma once

#include <functional>
#include <string>
#include <vector>

#include "reglab/common.hpp"
#include "reglab/quadrature.hpp"

namespace reglab {

enum class Divergence { Kl, Js };

std::string to_string(Divergence d);

// Compact-support 1-D density, evaluated pointwise and integrated on a fixed
// node set. Construction verifies nonnegativity at the nodes and unit mass
// within 1e-8.
class DensitySpec {
  public:
    DensitySpec(double lo, double hi, std::function<double(double)> pdf,
                int quad_nodes = 1024);

    static DensitySpec uniform(double lo, double hi, int quad_nodes = 1024);

    double lo() const { return rule_.lo; }
    double hi() const { return rule_.hi; }
    double pdf(double x) const { return pdf_(x); }
    int quad_nodes() const { return static_cast<int>(rule_.nodes.size()); }
    const QuadratureRule& rule() const { return rule_; }

  private:
    std::function<double(double)> pdf_;
    QuadratureRule rule_;
};

// Bounded pointwise-evaluable energy. min_bound/max_bound are declared
// bounds; solve paths verify them on the quadrature grid.
struct EnergySpec1D {
    std::function<double(double)> eval;
    double min_bound;
    double max_bound;

    static EnergySpec1D linear(double slope, double intercept, double lo, double hi);
    // Piecewise-linear interpolant of (xs, values); bounds from the values.
    static EnergySpec1D tabulated(std::vector<double> xs, std::vector<double> values);
};

struct SolveResult {
    Divergence divergence;
    double lambda;
    double alpha_star;
    double residual;
    // Uniform grid over the support including both endpoints.
    std::vector<double> grid_x;
    std::vector<double> grid_pd;
    std::vector<double> grid_energy;
    std::vector<double> grid_weight;
    std::vector<double> grid_pg;
};

// Reweighting coefficient of the solved density: 1/(alpha + lambda E) for
// KL, 1/(e^{alpha + lambda E} - 1) for JS. Throws InfeasibleAlpha when the
// combination alpha + lambda E is nonpositive.
double weight(Divergence div, double alpha, double lambda, double energy_value);

// integral of weight * p_d - 1 on the fixed node set; strictly decreasing in
// alpha on the feasible ray alpha > -lambda * min_bound.
double normalization_residual(const DensitySpec& density, const EnergySpec1D& energy,
                              Divergence div, double alpha, double lambda);

// Bracketing + bisection on the monotone residual. Throws NoFeasibleRoot when
// the residual is already negative at the feasibility boundary, and
// QuadratureUnstable when doubling the node count moves the root by more
// than 10 * tol.
SolveResult solve_alpha(const DensitySpec& density, const EnergySpec1D& energy,
                        Divergence div, double lambda, double tol = 1e-10,
                        int grid_points = 513);

struct WeightRange {
    double min_w;
    double max_w;
    double ratio;
};

WeightRange weight_range(const SolveResult& result);

} // namespace reglab
