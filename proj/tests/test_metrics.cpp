#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "reglab/common.hpp"
#include "reglab/metrics.hpp"
#include "reglab/rng.hpp"

using namespace reglab;

namespace {

std::vector<Point2> gaussian_cloud(Rng& rng, int n, double cx = 0.0, double cy = 0.0,
                                   double scale = 1.0) {
    std::vector<Point2> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) {
        p = {cx + scale * rng.normal(), cy + scale * rng.normal()};
    }
    return pts;
}

} // namespace

TEST_CASE("mmd2: identical samples and argument checks") {
    Rng rng(1);
    const auto x = gaussian_cloud(rng, 40);
    const Mmd2Result m = mmd2(x, x);
    CHECK(m.biased >= 0.0);
    CHECK(m.biased <= 1e-12);
    CHECK(std::abs(m.unbiased) < 1e-12);
    CHECK(m.bandwidth > 0.0);

    CHECK_THROWS_AS(mmd2(std::vector<Point2>{{0, 0}}, x), InvalidInput);
}

TEST_CASE("mmd2: same-distribution statistic sits inside the permutation null") {
    Rng rng(7);
    std::vector<Point2> pooled = gaussian_cloud(rng, 1000);
    const std::span<const Point2> all(pooled);
    const std::vector<Point2> x(all.begin(), all.begin() + 500);
    const std::vector<Point2> y(all.begin() + 500, all.end());
    const double h = median_pairwise_distance(x, y);
    const double stat = mmd2(x, y, h).unbiased;

    // Permutation null distribution of the same statistic.
    Rng perm(8);
    double sum = 0.0, sum2 = 0.0;
    const int reps = 200;
    std::vector<Point2> shuffled = pooled;
    for (int r = 0; r < reps; ++r) {
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            std::swap(shuffled[i - 1], shuffled[perm.below(i)]);
        }
        const std::vector<Point2> px(shuffled.begin(), shuffled.begin() + 500);
        const std::vector<Point2> py(shuffled.begin() + 500, shuffled.end());
        const double v = mmd2(px, py, h).unbiased;
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt(sum2 / reps - mean * mean);
    CHECK(std::abs(stat - mean) <= 3.0 * sd);
}

TEST_CASE("mmd2: distant point masses approach the kernel asymptote") {
    const std::vector<Point2> x{{0.0, 0.0}, {0.0, 0.0}};
    const std::vector<Point2> y{{1e6, 0.0}, {1e6, 0.0}};
    const Mmd2Result m = mmd2(x, y, 1.0);
    CHECK(m.biased == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("mmd2: symmetric, biased nonnegative, unbiased above its floor") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto x = gaussian_cloud(rng, 30, rng.uniform(-1, 1));
        const auto y = gaussian_cloud(rng, 25, rng.uniform(-1, 1));
        const Mmd2Result a = mmd2(x, y);
        const Mmd2Result b = mmd2(y, x);
        CHECK(a.unbiased == doctest::Approx(b.unbiased).epsilon(1e-12));
        CHECK(a.biased >= 0.0);
        CHECK(a.unbiased > -2.0 / std::min(x.size(), y.size()));
    }
}

TEST_CASE("frechet: moment-matched closed cases") {
    Rng rng(5);
    const auto x = gaussian_cloud(rng, 50);
    CHECK(frechet_gaussian(x, x) == doctest::Approx(0.0).epsilon(1e-12));

    // Pure mean shift: covariances cancel exactly.
    std::vector<Point2> shifted = x;
    for (auto& p : shifted) {
        p[0] += 1.0;
    }
    CHECK(frechet_gaussian(x, shifted) == doctest::Approx(1.0).epsilon(1e-9));

    // Exact circular point sets: cov = I and cov = 4I with equal means.
    const double a = std::sqrt(1.5);
    const std::vector<Point2> unit{{a, 0}, {-a, 0}, {0, a}, {0, -a}};
    std::vector<Point2> twice = unit;
    for (auto& p : twice) {
        p[0] *= 2.0;
        p[1] *= 2.0;
    }
    CHECK(frechet_gaussian(unit, twice) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(frechet_gaussian(std::vector<Point2>{{0, 0}, {1, 1}}, x),
                    InvalidInput);
}

TEST_CASE("frechet: symmetric and invariant under a common rotation") {
    Rng rng(9);
    const auto x = gaussian_cloud(rng, 60, 0.3, -0.2, 1.3);
    const auto y = gaussian_cloud(rng, 45, -0.5, 0.4, 0.8);
    const double base = frechet_gaussian(x, y);
    CHECK(frechet_gaussian(y, x) == doctest::Approx(base).epsilon(1e-12));

    const double theta = 0.7;
    const double c = std::cos(theta), s = std::sin(theta);
    auto rotate = [&](std::vector<Point2> pts) {
        for (auto& p : pts) {
            p = {c * p[0] - s * p[1], s * p[0] + c * p[1]};
        }
        return pts;
    };
    CHECK(frechet_gaussian(rotate(x), rotate(y)) ==
          doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("frechet: degenerate covariance falls back to the eigenvalue floor") {
    std::vector<Point2> line;
    for (int i = 0; i < 10; ++i) {
        line.push_back({0.1 * i, 0.2 * i});
    }
    Rng rng(13);
    const auto y = gaussian_cloud(rng, 20);
    const double v = frechet_gaussian(line, y);
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
}

TEST_CASE("metric_report populates every field") {
    Rng rng(17);
    const auto x = gaussian_cloud(rng, 40);
    const auto y = gaussian_cloud(rng, 30, 0.5);
    const MetricReport r = metric_report(x, y);
    CHECK(r.n_real == 40);
    CHECK(r.n_fake == 30);
    CHECK(r.bandwidth > 0.0);
    CHECK(r.mmd2_biased >= 0.0);
    CHECK(std::isfinite(r.frechet));
}
