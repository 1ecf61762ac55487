#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reglab/common.hpp"

namespace reglab {

// Univariate Gaussian mean-estimation instance: unknown mean mu_star with
// known variance sigma2, samples of size m, and a fixed external guess mu_pre.
struct GaussianSpec {
    double mu_star;
    double sigma2;
    int m;
    double mu_pre;

    GaussianSpec(double mu_star_, double sigma2_, int m_, double mu_pre_)
        : mu_star(mu_star_), sigma2(sigma2_), m(m_), mu_pre(mu_pre_) {
        if (!(sigma2 > 0.0)) {
            throw InvalidInput("GaussianSpec: sigma2 must be positive");
        }
        if (m < 1) {
            throw InvalidInput("GaussianSpec: m must be >= 1");
        }
    }

    // Bias of the external guess.
    double delta() const { return mu_pre - mu_star; }

    // The shipped defaults used across experiments and tests.
    static GaussianSpec defaults() { return GaussianSpec(0.0, 1.0, 150, 0.1); }
};

enum class EstimatorKind { Mle, Pre, Reg };

struct Estimator {
    EstimatorKind kind;
    double lambda = 0.0;

    static Estimator mle() { return {EstimatorKind::Mle, 0.0}; }
    static Estimator pre() { return {EstimatorKind::Pre, 0.0}; }
    static Estimator reg(double lambda) {
        if (!(lambda >= 0.0)) {
            throw InvalidInput("Estimator::reg: lambda must be >= 0");
        }
        return {EstimatorKind::Reg, lambda};
    }
};

struct TradeoffPoint {
    double beta;
    double mse_reg;
    double mse_mle;
    double mse_pre;
};

// Open interval of beta values where the interpolated estimator strictly
// beats both endpoints. degenerate means the open interval is empty
// (delta == 0, where the external guess already has zero error).
struct BetaInterval {
    double lo;
    double hi;
    bool degenerate;
};

// Minimizer of the quadratic risk in beta. degenerate (delta == 0) reports
// the limit beta -> 1 with unbounded lambda.
struct OptimalBeta {
    double beta_star;
    double lambda_star;
    double mse_min;
    bool degenerate;
};

struct McEstimate {
    double mse_hat;
    double std_error; // sqrt(sample variance of squared errors / trials)
    long trials;
};

// MLE: sample mean. PRE: mu_pre, sample ignored. REG(lambda): convex
// combination mean/(1+lambda) + lambda*mu_pre/(1+lambda); lambda = 0 takes
// the exact MLE path.
double estimate(const Estimator& est, std::span<const double> sample,
                const GaussianSpec& spec);

TradeoffPoint mse_closed_form(const GaussianSpec& spec, double beta);

BetaInterval admissible_beta_interval(const GaussianSpec& spec);

OptimalBeta optimal_beta(const GaussianSpec& spec);

// Empirical MSE over independent trials. Trial t draws from a stream derived
// from (seed, t), so the estimate is independent of execution order and of
// `jobs`; the reduction is compensated and runs in fixed trial order.
McEstimate monte_carlo_mse(const GaussianSpec& spec, const Estimator& est,
                           long trials, std::uint64_t seed, int jobs = 1);

// mse/(2 sigma2) + ln(2 pi sigma2)/2 + 1/2: population negative log-likelihood
// averaged over training sets, as a function of the estimator's MSE.
double expected_risk(const GaussianSpec& spec, double mse);

enum class SweepAxis { Beta, SampleSize, Bias };

struct SweepRow {
    double axis_value;
    double beta;
    double lambda;
    double mse_reg_cf;
    double mse_mle_cf;
    double mse_pre_cf;
    bool has_mc = false;
    double mse_reg_mc = 0.0;
    double mc_std_error = 0.0;

    double gap_mle() const { return mse_mle_cf - mse_reg_cf; }
    double gap_pre() const { return mse_pre_cf - mse_reg_cf; }
};

// One row per grid value. Beta sweeps use the grid as beta directly;
// SampleSize and Bias sweeps re-derive the optimal lambda at every point.
// mc_trials > 0 adds empirical columns for the interpolated estimator.
std::vector<SweepRow> sweep(const GaussianSpec& spec, SweepAxis axis,
                            std::span<const double> grid, long mc_trials,
                            std::uint64_t seed, int jobs = 1);

} // namespace reglab
