#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "reglab/gaussian_tradeoff.hpp"
#include "reglab/rng.hpp"
#include "test_util.hpp"

using namespace reglab;
using testutil::rel_err;

namespace {
const GaussianSpec kDefault = GaussianSpec::defaults(); // mu*=0, sigma2=1, m=150, mu_pre=0.1
}

TEST_CASE("estimate: closed forms") {
    const GaussianSpec spec(0.0, 1.0, 2, 1.0);
    const std::vector<double> zero_mean{-1.0, 1.0};
    CHECK(estimate(Estimator::reg(1.0), zero_mean, spec) == doctest::Approx(0.5));

    const GaussianSpec spec2(0.0, 1.0, 1, 0.1);
    const std::vector<double> single{0.2};
    CHECK(estimate(Estimator::reg(2.0 / 3.0), single, spec2) ==
          doctest::Approx(0.16).epsilon(1e-14));

    CHECK(estimate(Estimator::pre(), {}, spec2) == 0.1);
    CHECK(estimate(Estimator::mle(), single, spec2) == 0.2);

    CHECK_THROWS_AS(estimate(Estimator::mle(), {}, spec2), InvalidInput);
    CHECK_THROWS_AS(estimate(Estimator::reg(1.0), {}, spec2), InvalidInput);
    CHECK_THROWS_AS(Estimator::reg(-0.5), InvalidInput);
}

TEST_CASE("estimate: reg(0) is bit-identical to mle") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> sample(static_cast<std::size_t>(1 + rng.below(40)));
        for (auto& x : sample) {
            x = rng.normal(0.3, 1.7);
        }
        const double mle = estimate(Estimator::mle(), sample, kDefault);
        const double reg0 = estimate(Estimator::reg(0.0), sample, kDefault);
        CHECK(mle == reg0);
    }
}

TEST_CASE("mse_closed_form: frozen points") {
    CHECK(mse_closed_form(kDefault, 0.0).mse_reg ==
          doctest::Approx(1.0 / 150.0).epsilon(1e-15));
    CHECK(mse_closed_form(kDefault, 1.0).mse_reg ==
          doctest::Approx(0.01).epsilon(1e-14));
    const TradeoffPoint p = mse_closed_form(kDefault, 0.4);
    CHECK(p.mse_reg == doctest::Approx(0.004).epsilon(1e-13));
    // Same number via the minimum-value formula.
    const double d = kDefault.delta();
    const double via_min =
        kDefault.sigma2 * d * d / (kDefault.sigma2 + kDefault.m * d * d);
    CHECK(std::abs(p.mse_reg - via_min) < 1e-17);
    CHECK(p.mse_mle == doctest::Approx(1.0 / 150.0).epsilon(1e-15));
    CHECK(p.mse_pre == doctest::Approx(0.01).epsilon(1e-14));

    CHECK_THROWS_AS(mse_closed_form(kDefault, -0.1), InvalidInput);
    CHECK_THROWS_AS(mse_closed_form(kDefault, 1.1), InvalidInput);
}

TEST_CASE("admissible_beta_interval") {
    const BetaInterval i = admissible_beta_interval(kDefault);
    CHECK_FALSE(i.degenerate);
    CHECK(i.lo == 0.0);
    CHECK(i.hi == doctest::Approx(0.8).epsilon(1e-14));

    // Unbiased external guess: empty open interval, tagged.
    const BetaInterval deg = admissible_beta_interval(GaussianSpec(0.0, 1.0, 150, 0.0));
    CHECK(deg.degenerate);
    CHECK(deg.lo == 1.0);
    CHECK(deg.hi == 1.0);

    const BetaInterval wide = admissible_beta_interval(GaussianSpec(0.0, 1.0, 1, 10.0));
    CHECK(wide.lo == 0.0);
    CHECK(wide.hi == doctest::Approx(2.0 / 101.0).epsilon(1e-13));
}

TEST_CASE("optimal_beta") {
    const OptimalBeta opt = optimal_beta(kDefault);
    CHECK_FALSE(opt.degenerate);
    CHECK(opt.beta_star == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(opt.lambda_star == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(opt.mse_min == doctest::Approx(0.004).epsilon(1e-13));

    const OptimalBeta m10 = optimal_beta(GaussianSpec(0.0, 1.0, 10, 0.1));
    CHECK(m10.beta_star == doctest::Approx(1.0 / 1.1).epsilon(1e-13));
    CHECK(m10.lambda_star == doctest::Approx(10.0).epsilon(1e-13));
    CHECK(m10.mse_min == doctest::Approx(0.01 / 1.1).epsilon(1e-13));

    const OptimalBeta deg = optimal_beta(GaussianSpec(0.0, 1.0, 150, 0.0));
    CHECK(deg.degenerate);
    CHECK(deg.beta_star == 1.0);
    CHECK(std::isinf(deg.lambda_star));
    CHECK(deg.mse_min == 0.0);
}

TEST_CASE("optimal mse is the harmonic combination of the endpoint mses") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const GaussianSpec spec(rng.uniform(-3, 3), rng.uniform(0.1, 4.0),
                                static_cast<int>(1 + rng.below(500)),
                                rng.uniform(-3, 3));
        if (spec.delta() == 0.0) {
            continue;
        }
        const OptimalBeta opt = optimal_beta(spec);
        const double mle = spec.sigma2 / spec.m;
        const double pre = spec.delta() * spec.delta();
        CHECK(rel_err(opt.mse_min, mle * pre / (mle + pre)) < 1e-12);
    }
}

TEST_CASE("the quadratic is strictly convex and beats both endpoints inside the interval") {
    const BetaInterval interval = admissible_beta_interval(kDefault);
    const int n = 1000;
    double prev = 0.0, prev2 = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double beta =
            interval.lo + (interval.hi - interval.lo) * static_cast<double>(i) / n;
        const TradeoffPoint p = mse_closed_form(kDefault, beta);
        if (i > 0 && i < n) {
            CHECK(p.mse_reg < std::min(p.mse_mle, p.mse_pre));
        }
        if (i >= 2) {
            CHECK(prev2 + p.mse_reg - 2.0 * prev > 0.0); // positive second difference
        }
        prev2 = prev;
        prev = p.mse_reg;
    }
    // Boundary identities.
    CHECK(std::abs(mse_closed_form(kDefault, interval.hi).mse_reg -
                   mse_closed_form(kDefault, 0.0).mse_mle) < 1e-12);
    // A spec whose lower bound is strictly positive: there the interpolated
    // MSE equals the external guess's MSE.
    const GaussianSpec tight(0.0, 1.0, 50, 0.1);
    const BetaInterval ti = admissible_beta_interval(tight);
    CHECK(ti.lo == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    const TradeoffPoint at_lo = mse_closed_form(tight, ti.lo);
    CHECK(std::abs(at_lo.mse_reg - at_lo.mse_pre) < 1e-12);
}

TEST_CASE("monte_carlo_mse") {
    SUBCASE("external guess: exact, zero spread") {
        const McEstimate mc = monte_carlo_mse(kDefault, Estimator::pre(), 1000, 5);
        CHECK(mc.mse_hat ==
              doctest::Approx(kDefault.delta() * kDefault.delta()).epsilon(1e-15));
        CHECK(mc.std_error == 0.0);
    }
    SUBCASE("sample mean agrees with sigma2/m") {
        const McEstimate mc = monte_carlo_mse(kDefault, Estimator::mle(), 20000, 7);
        CHECK(std::abs(mc.mse_hat - 1.0 / 150.0) <= 3.0 * mc.std_error);
    }
    SUBCASE("optimally interpolated estimator agrees with the closed-form minimum") {
        const McEstimate mc =
            monte_carlo_mse(kDefault, Estimator::reg(2.0 / 3.0), 20000, 7);
        CHECK(std::abs(mc.mse_hat - 0.004) <= 3.0 * mc.std_error);
    }
    SUBCASE("deterministic given the seed and independent of jobs") {
        const McEstimate a = monte_carlo_mse(kDefault, Estimator::mle(), 5000, 3, 1);
        const McEstimate b = monte_carlo_mse(kDefault, Estimator::mle(), 5000, 3, 4);
        CHECK(a.mse_hat == b.mse_hat);
        CHECK(a.std_error == b.std_error);
    }
    CHECK_THROWS_AS(monte_carlo_mse(kDefault, Estimator::mle(), 1, 1), InvalidInput);
}

TEST_CASE("expected_risk") {
    CHECK(expected_risk(kDefault, 0.0) ==
          doctest::Approx(1.4189385332046727).epsilon(1e-14));
    CHECK(expected_risk(kDefault, 1.0 / 150.0) ==
          doctest::Approx(1.422271866538006).epsilon(1e-14));
    CHECK_THROWS_AS(expected_risk(kDefault, -1e-9), InvalidInput);

    // Affine and increasing in the MSE, so orderings carry over.
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const double a = rng.uniform(0.0, 2.0);
        const double b = rng.uniform(0.0, 2.0);
        const bool mse_order = a < b;
        const bool risk_order = expected_risk(kDefault, a) < expected_risk(kDefault, b);
        CHECK(mse_order == risk_order);
    }
}

TEST_CASE("sweep over beta") {
    const std::vector<double> grid{0.0, 0.4, 0.8};
    const auto rows = sweep(kDefault, SweepAxis::Beta, grid, 0, 1);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].mse_reg_cf == doctest::Approx(1.0 / 150.0).epsilon(1e-14));
    CHECK(rows[1].mse_reg_cf == doctest::Approx(0.004).epsilon(1e-13));
    CHECK(rows[2].mse_reg_cf == doctest::Approx(1.0 / 150.0).epsilon(1e-12));
    CHECK(std::abs(rows[2].mse_reg_cf - rows[2].mse_mle_cf) < 1e-12);
    CHECK(rows[1].lambda == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK_FALSE(rows[0].has_mc);
    // Both gap columns exposed on the row.
    CHECK(rows[1].gap_mle() == doctest::Approx(1.0 / 150.0 - 0.004).epsilon(1e-12));
    CHECK(rows[1].gap_pre() == doctest::Approx(0.01 - 0.004).epsilon(1e-12));
}

TEST_CASE("sweep over sample size matches the relative-gain ratios") {
    const std::vector<double> grid{10, 150, 1000};
    const auto rows = sweep(kDefault, SweepAxis::SampleSize, grid, 0, 1);
    const std::vector<double> want{1.0 / 11.0, 0.6, 10.0 / 11.0};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(std::abs(rows[i].mse_reg_cf / rows[i].mse_mle_cf - want[i]) < 1e-10);
    }
    CHECK_THROWS_AS(sweep(kDefault, SweepAxis::SampleSize, std::vector<double>{10.5},
                          0, 1),
                    InvalidInput);
}

TEST_CASE("sweep over bias uses the per-point optimum") {
    const std::vector<double> grid{0.05, 0.1, 0.2};
    const auto rows = sweep(kDefault, SweepAxis::Bias, grid, 0, 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double d = grid[i];
        const double want = kDefault.sigma2 * d * d /
                            (kDefault.sigma2 + kDefault.m * d * d);
        CHECK(rel_err(rows[i].mse_reg_cf, want) < 1e-12);
    }
    CHECK_THROWS_AS(sweep(kDefault, SweepAxis::Bias, std::vector<double>{0.0}, 0, 1),
                    InvalidInput);
    CHECK_THROWS_AS(sweep(kDefault, SweepAxis::Beta, std::vector<double>{}, 0, 1),
                    InvalidInput);
}

TEST_CASE("sweep monte carlo columns agree with the closed form") {
    const std::vector<double> grid{0.2, 0.4};
    const auto rows = sweep(kDefault, SweepAxis::Beta, grid, 4000, 17);
    for (const auto& row : rows) {
        REQUIRE(row.has_mc);
        CHECK(std::abs(row.mse_reg_mc - row.mse_reg_cf) <= 3.0 * row.mc_std_error);
    }
}
