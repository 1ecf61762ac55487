#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reglab/energy.hpp"
#include "reglab/gaussian_tradeoff.hpp"
#include "reglab/metrics.hpp"
#include "reglab/neural.hpp"

namespace reglab {

enum class ToyFamily { Ring8, TwoMoons, GaussianGrid };

std::string to_string(ToyFamily f);
ToyFamily toy_family_from_string(const std::string& name);

// 2-D toy population with a fixed, seed-determined limited prefix standing in
// for a small training split. Point k is generated from a stream derived from
// (seed, k), so the prefix is independent of full_size.
struct ToyDataset {
    ToyFamily family;
    int full_size;
    int limited_m;
    std::uint64_t seed;
    std::vector<Point2> full;

    std::span<const Point2> limited() const {
        return {full.data(), static_cast<std::size_t>(limited_m)};
    }
};

ToyDataset make_toy_dataset(ToyFamily family, int full_size, int limited_m,
                            std::uint64_t seed);

// Labeled draw from a perturbed relative of the family (modes rotated/
// shifted, noise inflated): pretraining data for the frozen extractor.
struct LabeledSet {
    std::vector<std::vector<double>> xs;
    std::vector<int> labels;
    int n_classes;
};

LabeledSet make_auxiliary_set(ToyFamily family, int n, std::uint64_t seed);

// Mean/std per coordinate of a point set (std floored at 1e-12).
void subset_normalization(std::span<const Point2> pts, std::vector<double>* mean,
                          std::vector<double>* stddev);

struct TrainConfig {
    int latent_dim = 2;
    std::vector<std::size_t> g_widths = {32, 32};
    std::vector<std::size_t> d_widths = {32, 32};
    double lr_g = 1e-3;
    double lr_d = 2e-3;
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.999;
    int batch_size = 32;
    double lambda = 0.0;
    int steps = 1500;
    EnergyConfig energy;
    std::string extractor_path; // required when lambda > 0
    std::uint64_t seed = 1;
    int eval_every = 250;
    int eval_samples = 512;
};

struct TraceRow {
    int step;
    double d_loss;      // binary cross-entropy of the discriminator
    double g_loss;      // non-saturating generator loss (adversarial part)
    double energy_mean; // batch mean energy; 0 when lambda == 0
    double mmd2;        // unbiased MMD^2, generator vs full population
    double frechet;
};

struct TrainTrace {
    std::vector<TraceRow> rows;
    Network generator;
    Network discriminator;
};

// Alternating discriminator/generator updates; the generator objective adds
// lambda * mean energy of the batch with gradients through the frozen
// extractor. When lambda == 0 the energy path is skipped entirely, including
// its RNG stream, so the run matches train_baseline bit for bit.
TrainTrace train_gan(const ToyDataset& data, const TrainConfig& cfg);
TrainTrace train_gan(const ToyDataset& data, const TrainConfig& cfg,
                     const FeatureExtractor* extractor);

// The same loop with no regularization code at all.
TrainTrace train_baseline(const ToyDataset& data, const TrainConfig& cfg);

// Gradient descent on the regularized quadratic
//   (1/m) sum (mu - x_i)^2 / (2 sigma2) + lambda (mu - mu_pre)^2 / (2 sigma2),
// starting from mu_pre. Must reach the closed-form interpolated estimate.
double fit_gaussian_gd(const GaussianSpec& spec, std::span<const double> sample,
                       double lambda, double lr, int steps);

std::vector<Point2> sample_generator(const Network& generator, int n,
                                     std::uint64_t seed);

} // namespace reglab
