#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reglab/common.hpp"
#include "reglab/quadrature.hpp"
#include "reglab/rng.hpp"

using namespace reglab;

TEST_CASE("low-order nodes and weights match the known values") {
    {
        const auto [nodes, weights] = gauss_legendre(1);
        CHECK(nodes[0] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(weights[0] == doctest::Approx(2.0).epsilon(1e-15));
    }
    {
        const auto [nodes, weights] = gauss_legendre(2);
        CHECK(nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
        CHECK(nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
        CHECK(weights[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(weights[1] == doctest::Approx(1.0).epsilon(1e-14));
    }
    {
        const auto [nodes, weights] = gauss_legendre(3);
        CHECK(nodes[1] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(nodes[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-14));
        CHECK(weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
        CHECK(weights[2] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
    }
}

TEST_CASE("n-point rule integrates polynomials up to degree 2n-1 exactly") {
    const int n = 8;
    const auto [nodes, weights] = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
        double got = 0.0;
        for (int i = 0; i < n; ++i) {
            got += weights[i] * std::pow(nodes[i], k);
        }
        const double want = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
        CHECK(got == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("composite rule on smooth integrands") {
    const QuadratureRule rule = composite_gauss_legendre(0.0, 1.0, 64);
    CHECK(rule.nodes.size() >= 64);
    CHECK(rule.integrate([](double x) { return std::exp(x); }) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    CHECK(rule.integrate([](double) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-14));

    const QuadratureRule wide = composite_gauss_legendre(-2.0, 3.0, 1024);
    CHECK(wide.integrate([](double x) { return x * x; }) ==
          doctest::Approx((27.0 + 8.0) / 3.0).epsilon(1e-13));
}

TEST_CASE("rule construction validates its arguments") {
    CHECK_THROWS_AS(composite_gauss_legendre(1.0, 0.0, 64), InvalidInput);
    CHECK_THROWS_AS(composite_gauss_legendre(0.0, 1.0, 0), InvalidInput);
    CHECK_THROWS_AS(gauss_legendre(0), InvalidInput);
}

TEST_CASE("stream derivation is deterministic and decorrelated") {
    Rng a = Rng::stream(123, 7);
    Rng b = Rng::stream(123, 7);
    Rng c = Rng::stream(123, 8);
    bool differ = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        differ = differ || (va != c.next_u64());
    }
    CHECK(differ);
}

TEST_CASE("uniform and normal sampling look right") {
    Rng rng(2024);
    double sum = 0.0, sum2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sum2 / n - (sum / n) * (sum / n) ==
          doctest::Approx(1.0 / 12.0).epsilon(0.05));

    double nsum = 0.0, nsum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        nsum += z;
        nsum2 += z * z;
    }
    CHECK(std::abs(nsum / n) < 0.02);
    CHECK(nsum2 / n == doctest::Approx(1.0).epsilon(0.02));

    for (int i = 0; i < 1000; ++i) {
        CHECK(rng.below(10) < 10);
    }
}
