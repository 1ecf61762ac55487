#include "reglab/gaussian_tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "reglab/rng.hpp"
#include "reglab/simd/simd.hpp"

namespace reglab {

double estimate(const Estimator& est, std::span<const double> sample,
                const GaussianSpec& spec) {
    if (est.kind == EstimatorKind::Pre) {
        return spec.mu_pre;
    }
    if (sample.empty()) {
        throw InvalidInput("estimate: empty sample");
    }
    const double mean =
        simd::active().sum(sample.data(), sample.size()) / static_cast<double>(sample.size());
    if (est.kind == EstimatorKind::Mle || est.lambda == 0.0) {
        return mean;
    }
    const double w = 1.0 / (1.0 + est.lambda);
    return w * mean + (est.lambda * w) * spec.mu_pre;
}

TradeoffPoint mse_closed_form(const GaussianSpec& spec, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw InvalidInput("mse_closed_form: beta must lie in [0, 1]");
    }
    const double d = spec.delta();
    const double mse_mle = spec.sigma2 / spec.m;
    const double mse_pre = d * d;
    const double mse_reg = beta * beta * mse_pre + (1.0 - beta) * (1.0 - beta) * mse_mle;
    return {beta, mse_reg, mse_mle, mse_pre};
}

BetaInterval admissible_beta_interval(const GaussianSpec& spec) {
    const double d = spec.delta();
    const double md2 = spec.m * d * d;
    const double lo = std::max((spec.sigma2 - md2) / (spec.sigma2 + md2), 0.0);
    const double hi = std::min(2.0 * spec.sigma2 / (spec.sigma2 + md2), 1.0);
    return {lo, hi, !(lo < hi)};
}

OptimalBeta optimal_beta(const GaussianSpec& spec) {
    const double d = spec.delta();
    if (d == 0.0) {
        return {1.0, std::numeric_limits<double>::infinity(), 0.0, true};
    }
    const double md2 = spec.m * d * d;
    const double beta_star = spec.sigma2 / (spec.sigma2 + md2);
    const double lambda_star = spec.sigma2 / md2;
    const double mse_min = spec.sigma2 * d * d / (spec.sigma2 + md2);
    return {beta_star, lambda_star, mse_min, false};
}

McEstimate monte_carlo_mse(const GaussianSpec& spec, const Estimator& est,
                           long trials, std::uint64_t seed, int jobs) {
    if (trials < 2) {
        throw InvalidInput("monte_carlo_mse: trials must be >= 2");
    }
    const double sigma = std::sqrt(spec.sigma2);

    std::vector<double> sq_errors(static_cast<std::size_t>(trials));
    const bool uses_sample = est.kind != EstimatorKind::Pre;
    auto run_range = [&](long begin, long end) {
        std::vector<double> sample(static_cast<std::size_t>(spec.m));
        for (long t = begin; t < end; ++t) {
            double value;
            if (uses_sample) {
                Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t));
                for (auto& x : sample) {
                    x = rng.normal(spec.mu_star, sigma);
                }
                value = estimate(est, sample, spec);
            } else {
                value = spec.mu_pre;
            }
            const double err = value - spec.mu_star;
            sq_errors[static_cast<std::size_t>(t)] = err * err;
        }
    };

    if (jobs <= 1) {
        run_range(0, trials);
    } else {
        const int workers = std::min<long>(jobs, trials);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const long chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const long begin = w * chunk;
            const long end = std::min(trials, begin + chunk);
            if (begin < end) {
                pool.emplace_back(run_range, begin, end);
            }
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    // Fixed-order compensated reduction: the result does not depend on jobs.
    CompensatedSum sum;
    for (double e : sq_errors) {
        sum.add(e);
    }
    const double mean = sum.value() / static_cast<double>(trials);

    CompensatedSum var_sum;
    for (double e : sq_errors) {
        const double dev = e - mean;
        var_sum.add(dev * dev);
    }
    const double sample_var = var_sum.value() / static_cast<double>(trials - 1);
    const double std_error = std::sqrt(sample_var / static_cast<double>(trials));
    return {mean, std_error, trials};
}

double expected_risk(const GaussianSpec& spec, double mse) {
    if (!(mse >= 0.0)) {
        throw InvalidInput("expected_risk: mse must be >= 0");
    }
    constexpr double kTwoPi = 6.28318530717958647692;
    return mse / (2.0 * spec.sigma2) + 0.5 * std::log(kTwoPi * spec.sigma2) + 0.5;
}

namespace {

double lambda_from_beta(double beta) {
    return beta < 1.0 ? beta / (1.0 - beta) : std::numeric_limits<double>::infinity();
}

} // namespace

std::vector<SweepRow> sweep(const GaussianSpec& spec, SweepAxis axis,
                            std::span<const double> grid, long mc_trials,
                            std::uint64_t seed, int jobs) {
    if (grid.empty()) {
        throw InvalidInput("sweep: empty grid");
    }
    std::vector<SweepRow> rows(grid.size());

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = grid[i];
        SweepRow& row = rows[i];
        row.axis_value = v;

        switch (axis) {
        case SweepAxis::Beta: {
            const TradeoffPoint p = mse_closed_form(spec, v);
            row.beta = v;
            row.lambda = lambda_from_beta(v);
            row.mse_reg_cf = p.mse_reg;
            row.mse_mle_cf = p.mse_mle;
            row.mse_pre_cf = p.mse_pre;
            break;
        }
        case SweepAxis::SampleSize: {
            if (!(v > 0.0) || v != std::floor(v)) {
                throw InvalidInput("sweep: sample-size grid values must be positive integers");
            }
            const GaussianSpec point(spec.mu_star, spec.sigma2, static_cast<int>(v),
                                     spec.mu_pre);
            const OptimalBeta opt = optimal_beta(point);
            if (opt.degenerate) {
                throw InvalidInput("sweep: optimal lambda undefined when delta is 0");
            }
            const TradeoffPoint p = mse_closed_form(point, opt.beta_star);
            row.beta = opt.beta_star;
            row.lambda = opt.lambda_star;
            row.mse_reg_cf = p.mse_reg;
            row.mse_mle_cf = p.mse_mle;
            row.mse_pre_cf = p.mse_pre;
            break;
        }
        case SweepAxis::Bias: {
            if (v == 0.0) {
                throw InvalidInput("sweep: bias grid values must be nonzero");
            }
            const GaussianSpec point(spec.mu_star, spec.sigma2, spec.m,
                                     spec.mu_star + v);
            const OptimalBeta opt = optimal_beta(point);
            const TradeoffPoint p = mse_closed_form(point, opt.beta_star);
            row.beta = opt.beta_star;
            row.lambda = opt.lambda_star;
            row.mse_reg_cf = p.mse_reg;
            row.mse_mle_cf = p.mse_mle;
            row.mse_pre_cf = p.mse_pre;
            break;
        }
        }
    }

    if (mc_trials > 0) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            SweepRow& row = rows[i];
            GaussianSpec point = spec;
            if (axis == SweepAxis::SampleSize) {
                point = GaussianSpec(spec.mu_star, spec.sigma2,
                                     static_cast<int>(row.axis_value), spec.mu_pre);
            } else if (axis == SweepAxis::Bias) {
                point = GaussianSpec(spec.mu_star, spec.sigma2, spec.m,
                                     spec.mu_star + row.axis_value);
            }
            const Estimator est = std::isfinite(row.lambda)
                                      ? Estimator::reg(row.lambda)
                                      : Estimator::pre();
            const McEstimate mc = monte_carlo_mse(
                point, est, mc_trials, Rng::derive_seed(seed, i), jobs);
            row.has_mc = true;
            row.mse_reg_mc = mc.mse_hat;
            row.mc_std_error = mc.std_error;
        }
    }
    return rows;
}

} // namespace reglab
