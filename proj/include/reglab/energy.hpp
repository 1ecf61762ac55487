#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "reglab/neural.hpp"

namespace reglab {

// Frozen map from sample space to feature space: per-coordinate
// normalization followed by a dense net truncated at a chosen layer's
// pre-activation. Immutable after construction.
class FeatureExtractor {
  public:
    // feature_layer = -1 selects the last layer. The feature is that layer's
    // pre-activation.
    FeatureExtractor(Network net, std::vector<double> norm_mean,
                     std::vector<double> norm_std, int feature_layer = -1);

    std::size_t dim_in() const { return feature_net_.input_dim(); }
    std::size_t dim_out() const { return feature_net_.output_dim(); }
    int feature_layer() const { return layer_; }
    const std::vector<double>& norm_mean() const { return mean_; }
    const std::vector<double>& norm_std() const { return std_; }

    std::vector<double> features(std::span<const double> x) const;

    // Gradient of sum(g . features(x)) with respect to x.
    std::vector<double> input_grad(std::span<const double> x,
                                   std::span<const double> g) const;

    void save(std::ostream& out) const;
    static FeatureExtractor load(std::istream& in);
    void save_file(const std::string& path) const;
    static FeatureExtractor load_file(const std::string& path);

    // Fixed-seed random-weight extractor.
    static FeatureExtractor random(const std::vector<std::size_t>& dims,
                                   std::uint64_t seed,
                                   std::vector<double> norm_mean = {},
                                   std::vector<double> norm_std = {});

  private:
    Network feature_net_; // truncated at the feature layer, identity output
    std::vector<double> mean_;
    std::vector<double> std_;
    int layer_;
    std::size_t full_layer_count_;

    std::vector<double> normalize(std::span<const double> x) const;
};

enum class EnergyKind { DataMse, FeatureMatching, EntropyMin };

std::string to_string(EnergyKind k);
EnergyKind energy_kind_from_string(const std::string& name);

struct EnergyConfig {
    EnergyKind kind = EnergyKind::DataMse;
    int n_mc = 1;         // reference points drawn per energy evaluation
    int entropy_sign = 1; // +1: lower energy = lower prediction entropy
};

// mean over x' in refs of ||f(x) - f(x')||^2 / d.
double energy_data_mse(std::span<const double> x,
                       std::span<const std::vector<double>> refs,
                       const FeatureExtractor& f);

// Exact gradient of energy_data_mse with respect to x.
std::vector<double> energy_data_mse_grad(std::span<const double> x,
                                         std::span<const std::vector<double>> refs,
                                         const FeatureExtractor& f);

// ||mean f(real) - mean f(fake)||^2. Batch-level: not expressible as a
// per-sample expectation, so it is handled separately from the energies.
double feature_matching_loss(std::span<const std::vector<double>> real_batch,
                             std::span<const std::vector<double>> fake_batch,
                             const FeatureExtractor& f);

// d feature_matching_loss / d fake_batch[i], one vector per fake point.
std::vector<std::vector<double>> feature_matching_grad_fake(
    std::span<const std::vector<double>> real_batch,
    std::span<const std::vector<double>> fake_batch, const FeatureExtractor& f);

// sign * H(softmax(f(x))) in nats, with a 1e-12 probability floor inside the
// logs. sign = +1 makes minimizing the energy minimize prediction entropy.
double energy_entropy(std::span<const double> x, const FeatureExtractor& f,
                      int sign = 1);

std::vector<double> energy_entropy_grad(std::span<const double> x,
                                        const FeatureExtractor& f, int sign = 1);

// Classifier-backed extractor: trains a dense softmax classifier on the
// labeled set, then freezes it. Feature = configurable layer pre-activation.
struct ClassifierTrainOptions {
    std::vector<std::size_t> hidden = {32, 32};
    int steps = 2000;
    int batch_size = 64;
    double lr = 1e-3;
    int feature_layer = -1;
};

FeatureExtractor train_classifier_extractor(
    std::span<const std::vector<double>> xs, std::span<const int> labels,
    int n_classes, std::vector<double> norm_mean, std::vector<double> norm_std,
    const ClassifierTrainOptions& opts, std::uint64_t seed);

} // namespace reglab
