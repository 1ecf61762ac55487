#pragma once

#include <array>
#include <optional>
#include <span>

namespace reglab {

using Point2 = std::array<double, 2>;

struct Mmd2Result {
    double unbiased;
    double biased;
    double bandwidth;
};

// RBF-kernel MMD^2 with k(x, y) = exp(-||x - y||^2 / (2 h^2)). When no
// bandwidth is given, h is the median pairwise Euclidean distance over the
// pooled sample. Requires |X|, |Y| >= 2.
Mmd2Result mmd2(std::span<const Point2> x, std::span<const Point2> y,
                std::optional<double> bandwidth = std::nullopt);

// Median pairwise distance of the pooled sample (the default bandwidth).
double median_pairwise_distance(std::span<const Point2> x, std::span<const Point2> y);

// ||mu_X - mu_Y||^2 + Tr(Sx + Sy - 2 (Sx Sy)^{1/2}) with sample moments and
// the 2x2 square root in closed form. Covariance eigenvalues are floored at
// 1e-12. Requires |X|, |Y| >= 3.
double frechet_gaussian(std::span<const Point2> x, std::span<const Point2> y);

struct MetricReport {
    double mmd2_unbiased;
    double mmd2_biased;
    double frechet;
    double bandwidth;
    int n_real;
    int n_fake;
};

MetricReport metric_report(std::span<const Point2> real, std::span<const Point2> fake,
                           std::optional<double> bandwidth = std::nullopt);

} // namespace reglab
