#include "reglab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "reglab/common.hpp"

namespace reglab {

namespace {

inline double sq_dist2(const Point2& a, const Point2& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

// Mean of k(x_i, y_j) over i != j (unbiased) or all pairs (biased) for one
// sample against itself.
void self_kernel_sums(std::span<const Point2> pts, double inv_two_h2,
                      double* off_diag_sum, std::size_t* off_diag_count) {
    CompensatedSum acc;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            acc.add(std::exp(-sq_dist2(pts[i], pts[j]) * inv_two_h2));
        }
    }
    *off_diag_sum = 2.0 * acc.value(); // symmetric pairs
    *off_diag_count = n * (n - 1);
}

} // namespace

double median_pairwise_distance(std::span<const Point2> x, std::span<const Point2> y) {
    std::vector<Point2> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const std::size_t n = pooled.size();
    if (n < 2) {
        throw InvalidInput("median_pairwise_distance: need at least 2 points");
    }
    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dists.push_back(std::sqrt(sq_dist2(pooled[i], pooled[j])));
        }
    }
    const std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
    return dists[mid];
}

Mmd2Result mmd2(std::span<const Point2> x, std::span<const Point2> y,
                std::optional<double> bandwidth) {
    if (x.size() < 2 || y.size() < 2) {
        throw InvalidInput("mmd2: need at least 2 points per sample");
    }
    double h = bandwidth ? *bandwidth : median_pairwise_distance(x, y);
    if (!(h > 0.0)) {
        h = 1e-12; // degenerate pooled sample (all points identical)
    }
    const double inv_two_h2 = 1.0 / (2.0 * h * h);
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());

    double sxx = 0.0, syy = 0.0;
    std::size_t cxx = 0, cyy = 0;
    self_kernel_sums(x, inv_two_h2, &sxx, &cxx);
    self_kernel_sums(y, inv_two_h2, &syy, &cyy);

    CompensatedSum cross;
    for (const auto& xi : x) {
        for (const auto& yj : y) {
            cross.add(std::exp(-sq_dist2(xi, yj) * inv_two_h2));
        }
    }
    const double sxy = cross.value();

    const double unbiased = sxx / static_cast<double>(cxx) +
                            syy / static_cast<double>(cyy) -
                            2.0 * sxy / (nx * ny);
    // Diagonal kernel values are exactly 1. The biased estimator is a squared
    // RKHS norm; clamp the last-ulp float noise so it stays nonnegative.
    const double biased = std::max((sxx + nx) / (nx * nx) + (syy + ny) / (ny * ny) -
                                       2.0 * sxy / (nx * ny),
                                   0.0);
    return {unbiased, biased, h};
}

namespace {

struct Moments2 {
    double mean[2];
    double cov[3]; // xx, xy, yy
};

Moments2 sample_moments(std::span<const Point2> pts) {
    const double n = static_cast<double>(pts.size());
    Moments2 m{};
    for (const auto& p : pts) {
        m.mean[0] += p[0];
        m.mean[1] += p[1];
    }
    m.mean[0] /= n;
    m.mean[1] /= n;
    for (const auto& p : pts) {
        const double dx = p[0] - m.mean[0];
        const double dy = p[1] - m.mean[1];
        m.cov[0] += dx * dx;
        m.cov[1] += dx * dy;
        m.cov[2] += dy * dy;
    }
    const double denom = n - 1.0;
    m.cov[0] /= denom;
    m.cov[1] /= denom;
    m.cov[2] /= denom;
    return m;
}

// Floor the eigenvalues of a symmetric 2x2 matrix {a, b; b, c} at lo.
void floor_eigenvalues(double* a, double* b, double* c, double lo) {
    const double tr = *a + *c;
    const double det = (*a) * (*c) - (*b) * (*b);
    const double gap = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
    double l1 = 0.5 * tr + gap;
    double l2 = 0.5 * tr - gap;
    if (l2 >= lo) {
        return;
    }
    // Eigenvector for l1; the orthogonal one carries l2.
    double vx, vy;
    if (std::abs(*b) > 1e-300) {
        vx = l1 - *c;
        vy = *b;
    } else if (*a >= *c) {
        vx = 1.0;
        vy = 0.0;
    } else {
        vx = 0.0;
        vy = 1.0;
    }
    const double norm = std::sqrt(vx * vx + vy * vy);
    vx /= norm;
    vy /= norm;
    l1 = std::max(l1, lo);
    l2 = std::max(l2, lo);
    *a = l1 * vx * vx + l2 * vy * vy;
    *b = (l1 - l2) * vx * vy;
    *c = l1 * vy * vy + l2 * vx * vx;
}

} // namespace

double frechet_gaussian(std::span<const Point2> x, std::span<const Point2> y) {
    if (x.size() < 3 || y.size() < 3) {
        throw InvalidInput("frechet_gaussian: need at least 3 points per sample");
    }
    Moments2 mx = sample_moments(x);
    Moments2 my = sample_moments(y);
    constexpr double kFloor = 1e-12;
    floor_eigenvalues(&mx.cov[0], &mx.cov[1], &mx.cov[2], kFloor);
    floor_eigenvalues(&my.cov[0], &my.cov[1], &my.cov[2], kFloor);

    const double dmx = mx.mean[0] - my.mean[0];
    const double dmy = mx.mean[1] - my.mean[1];
    const double mean_term = dmx * dmx + dmy * dmy;

    // M = Sx Sy has nonnegative eigenvalues; tr sqrt(M) follows from the
    // 2x2 identities tr sqrt = sqrt(tr M + 2 sqrt(det M)).
    const double tr_m = mx.cov[0] * my.cov[0] + 2.0 * mx.cov[1] * my.cov[1] +
                        mx.cov[2] * my.cov[2];
    const double det_x = mx.cov[0] * mx.cov[2] - mx.cov[1] * mx.cov[1];
    const double det_y = my.cov[0] * my.cov[2] - my.cov[1] * my.cov[1];
    const double det_m = std::max(det_x, 0.0) * std::max(det_y, 0.0);
    const double tr_sqrt = std::sqrt(std::max(tr_m + 2.0 * std::sqrt(det_m), 0.0));

    const double trace_term =
        mx.cov[0] + mx.cov[2] + my.cov[0] + my.cov[2] - 2.0 * tr_sqrt;
    return std::max(mean_term + trace_term, 0.0);
}

MetricReport metric_report(std::span<const Point2> real, std::span<const Point2> fake,
                           std::optional<double> bandwidth) {
    const Mmd2Result m = mmd2(real, fake, bandwidth);
    return {m.unbiased,
            m.biased,
            frechet_gaussian(real, fake),
            m.bandwidth,
            static_cast<int>(real.size()),
            static_cast<int>(fake.size())};
}

} // namespace reglab
