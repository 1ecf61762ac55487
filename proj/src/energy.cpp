#include "reglab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "reglab/rng.hpp"
#include "reglab/simd/simd.hpp"

namespace reglab {

std::string to_string(EnergyKind k) {
    switch (k) {
    case EnergyKind::DataMse: return "data_mse";
    case EnergyKind::FeatureMatching: return "feature_matching";
    case EnergyKind::EntropyMin: return "entropy_min";
    }
    return "data_mse";
}

EnergyKind energy_kind_from_string(const std::string& name) {
    if (name == "data_mse") return EnergyKind::DataMse;
    if (name == "feature_matching") return EnergyKind::FeatureMatching;
    if (name == "entropy_min") return EnergyKind::EntropyMin;
    throw InvalidInput("unknown energy kind: " + name);
}

namespace {

// Layers up to the feature layer keep their activation; the feature layer
// itself becomes linear so the forward output is its pre-activation.
Network truncate_at(Network net, int feature_layer, std::size_t* full_count) {
    *full_count = net.layers.size();
    int layer = feature_layer < 0
                    ? static_cast<int>(net.layers.size()) - 1
                    : feature_layer;
    if (layer < 0 || layer >= static_cast<int>(net.layers.size())) {
        throw InvalidInput("FeatureExtractor: feature_layer out of range");
    }
    net.layers.resize(static_cast<std::size_t>(layer) + 1);
    net.layers.back().act = Activation::Identity;
    return net;
}

} // namespace

FeatureExtractor::FeatureExtractor(Network net, std::vector<double> norm_mean,
                                   std::vector<double> norm_std, int feature_layer)
    : feature_net_(truncate_at(std::move(net), feature_layer, &full_layer_count_)),
      mean_(std::move(norm_mean)),
      std_(std::move(norm_std)),
      layer_(feature_layer < 0 ? static_cast<int>(feature_net_.layers.size()) - 1
                               : feature_layer) {
    if (mean_.empty()) {
        mean_.assign(dim_in(), 0.0);
    }
    if (std_.empty()) {
        std_.assign(dim_in(), 1.0);
    }
    if (mean_.size() != dim_in() || std_.size() != dim_in()) {
        throw InvalidInput("FeatureExtractor: normalization size mismatch");
    }
    for (double s : std_) {
        if (!(s > 0.0)) {
            throw InvalidInput("FeatureExtractor: normalization std must be positive");
        }
    }
    if (dim_out() < 1) {
        throw InvalidInput("FeatureExtractor: empty feature dimension");
    }
}

std::vector<double> FeatureExtractor::normalize(std::span<const double> x) const {
    if (x.size() != dim_in()) {
        throw InvalidInput("FeatureExtractor: input dimension mismatch");
    }
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = (x[i] - mean_[i]) / std_[i];
    }
    return z;
}

std::vector<double> FeatureExtractor::features(std::span<const double> x) const {
    return forward(feature_net_, normalize(x));
}

std::vector<double> FeatureExtractor::input_grad(std::span<const double> x,
                                                 std::span<const double> g) const {
    Tape tape;
    forward(feature_net_, normalize(x), &tape);
    BackwardResult back = backward(feature_net_, tape, g);
    for (std::size_t i = 0; i < back.input_grad.size(); ++i) {
        back.input_grad[i] /= std_[i];
    }
    return back.input_grad;
}

FeatureExtractor FeatureExtractor::random(const std::vector<std::size_t>& dims,
                                          std::uint64_t seed,
                                          std::vector<double> norm_mean,
                                          std::vector<double> norm_std) {
    std::vector<Activation> acts(dims.size() - 1, Activation::Tanh);
    acts.back() = Activation::Identity;
    return FeatureExtractor(Network::random(dims, acts, seed), std::move(norm_mean),
                            std::move(norm_std), -1);
}

// Extractor file = normalization block + feature layer index + embedded net.
void FeatureExtractor::save(std::ostream& out) const {
    out << "reglab-extractor 1\n";
    out << "normalization " << mean_.size() << "\n";
    char buf[64];
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%a %a", mean_[i], std_[i]);
        out << buf << "\n";
    }
    out << "feature_layer " << layer_ << "\n";
    feature_net_.save(out);
}

FeatureExtractor FeatureExtractor::load(std::istream& in) {
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "reglab-extractor" || version != 1) {
        throw InvalidInput("extractor file: bad header");
    }
    std::size_t dim = 0;
    in >> tag >> dim;
    if (tag != "normalization" || dim == 0) {
        throw InvalidInput("extractor file: bad normalization block");
    }
    std::vector<double> mean(dim), stddev(dim);
    std::string a, b;
    for (std::size_t i = 0; i < dim; ++i) {
        in >> a >> b;
        mean[i] = std::stod(a);
        stddev[i] = std::stod(b);
    }
    int layer = -1;
    in >> tag >> layer;
    if (tag != "feature_layer") {
        throw InvalidInput("extractor file: missing feature_layer");
    }
    Network net = Network::load(in);
    return FeatureExtractor(std::move(net), std::move(mean), std::move(stddev), layer);
}

void FeatureExtractor::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("cannot open for writing: " + path);
    }
    save(out);
}

FeatureExtractor FeatureExtractor::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open extractor file: " + path);
    }
    return load(in);
}

double energy_data_mse(std::span<const double> x,
                       std::span<const std::vector<double>> refs,
                       const FeatureExtractor& f) {
    if (refs.empty()) {
        throw InvalidInput("energy_data_mse: empty reference set");
    }
    const std::vector<double> fx = f.features(x);
    const double d = static_cast<double>(fx.size());
    CompensatedSum acc;
    for (const auto& ref : refs) {
        const std::vector<double> fr = f.features(ref);
        acc.add(simd::active().sq_dist(fx.data(), fr.data(), fx.size()) / d);
    }
    return acc.value() / static_cast<double>(refs.size());
}

std::vector<double> energy_data_mse_grad(std::span<const double> x,
                                         std::span<const std::vector<double>> refs,
                                         const FeatureExtractor& f) {
    if (refs.empty()) {
        throw InvalidInput("energy_data_mse_grad: empty reference set");
    }
    const std::vector<double> fx = f.features(x);
    const double d = static_cast<double>(fx.size());
    std::vector<double> mean_ref(fx.size(), 0.0);
    for (const auto& ref : refs) {
        const std::vector<double> fr = f.features(ref);
        simd::active().axpy(1.0, fr.data(), mean_ref.data(), fr.size());
    }
    const double inv_n = 1.0 / static_cast<double>(refs.size());
    std::vector<double> g(fx.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = (2.0 / d) * (fx[i] - mean_ref[i] * inv_n);
    }
    return f.input_grad(x, g);
}

namespace {

std::vector<double> mean_features(std::span<const std::vector<double>> batch,
                                  const FeatureExtractor& f) {
    std::vector<double> mean(f.dim_out(), 0.0);
    for (const auto& x : batch) {
        const std::vector<double> fx = f.features(x);
        simd::active().axpy(1.0, fx.data(), mean.data(), fx.size());
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto& v : mean) {
        v *= inv;
    }
    return mean;
}

} // namespace

double feature_matching_loss(std::span<const std::vector<double>> real_batch,
                             std::span<const std::vector<double>> fake_batch,
                             const FeatureExtractor& f) {
    if (real_batch.empty() || fake_batch.empty()) {
        throw InvalidInput("feature_matching_loss: empty batch");
    }
    const std::vector<double> mr = mean_features(real_batch, f);
    const std::vector<double> mf = mean_features(fake_batch, f);
    return simd::active().sq_dist(mr.data(), mf.data(), mr.size());
}

std::vector<std::vector<double>> feature_matching_grad_fake(
    std::span<const std::vector<double>> real_batch,
    std::span<const std::vector<double>> fake_batch, const FeatureExtractor& f) {
    if (real_batch.empty() || fake_batch.empty()) {
        throw InvalidInput("feature_matching_grad_fake: empty batch");
    }
    const std::vector<double> mr = mean_features(real_batch, f);
    const std::vector<double> mf = mean_features(fake_batch, f);
    std::vector<double> g(mr.size());
    const double scale = -2.0 / static_cast<double>(fake_batch.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = scale * (mr[i] - mf[i]);
    }
    std::vector<std::vector<double>> grads;
    grads.reserve(fake_batch.size());
    for (const auto& x : fake_batch) {
        grads.push_back(f.input_grad(x, g));
    }
    return grads;
}

namespace {

constexpr double kProbFloor = 1e-12;

std::vector<double> softmax(std::span<const double> logits) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        z += p[i];
    }
    for (auto& v : p) {
        v /= z;
    }
    return p;
}

} // namespace

double energy_entropy(std::span<const double> x, const FeatureExtractor& f, int sign) {
    if (f.dim_out() < 2) {
        throw InvalidInput("energy_entropy: extractor must output >= 2 logits");
    }
    const std::vector<double> logits = f.features(x);
    const std::vector<double> p = softmax(logits);
    double h = 0.0;
    for (double pi : p) {
        h -= pi * std::log(std::max(pi, kProbFloor));
    }
    return sign * h;
}

std::vector<double> energy_entropy_grad(std::span<const double> x,
                                        const FeatureExtractor& f, int sign) {
    const std::vector<double> logits = f.features(x);
    const std::vector<double> p = softmax(logits);
    double h = 0.0;
    for (double pi : p) {
        h -= pi * std::log(std::max(pi, kProbFloor));
    }
    // dH/dz_j = -p_j (log p_j + H)
    std::vector<double> g(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        g[j] = sign * (-p[j] * (std::log(std::max(p[j], kProbFloor)) + h));
    }
    return f.input_grad(x, g);
}

FeatureExtractor train_classifier_extractor(
    std::span<const std::vector<double>> xs, std::span<const int> labels,
    int n_classes, std::vector<double> norm_mean, std::vector<double> norm_std,
    const ClassifierTrainOptions& opts, std::uint64_t seed) {
    if (xs.empty() || xs.size() != labels.size()) {
        throw InvalidInput("train_classifier_extractor: xs and labels must match and be nonempty");
    }
    if (n_classes < 2) {
        throw InvalidInput("train_classifier_extractor: need >= 2 classes");
    }
    const std::size_t dim_in = xs.front().size();

    std::vector<std::size_t> dims{dim_in};
    dims.insert(dims.end(), opts.hidden.begin(), opts.hidden.end());
    dims.push_back(static_cast<std::size_t>(n_classes));
    std::vector<Activation> acts(dims.size() - 1, Activation::LeakyRelu);
    acts.back() = Activation::Identity;

    Network net = Network::random(dims, acts, Rng::derive_seed(seed, 0));
    AdamOptimizer opt(opts.lr);
    Rng batch_rng = Rng::stream(seed, 1);

    // Classifier inputs share the extractor's normalization.
    if (norm_mean.empty()) {
        norm_mean.assign(dim_in, 0.0);
    }
    if (norm_std.empty()) {
        norm_std.assign(dim_in, 1.0);
    }
    const auto& mean = norm_mean;
    const auto& stddev = norm_std;

    std::vector<double> z(dim_in);
    for (int step = 0; step < opts.steps; ++step) {
        ParamGrads grads = ParamGrads::zeros_like(net);
        for (int b = 0; b < opts.batch_size; ++b) {
            const std::size_t i =
                static_cast<std::size_t>(batch_rng.below(xs.size()));
            for (std::size_t k = 0; k < dim_in; ++k) {
                z[k] = (xs[i][k] - mean[k]) / stddev[k];
            }
            Tape tape;
            const std::vector<double> logits = forward(net, z, &tape);
            std::vector<double> g = softmax(logits);
            g[static_cast<std::size_t>(labels[i])] -= 1.0; // d cross-entropy / d logits
            for (auto& v : g) {
                v /= static_cast<double>(opts.batch_size);
            }
            backward_accumulate(net, tape, g, grads, nullptr);
        }
        opt.step(net, grads);
    }
    return FeatureExtractor(std::move(net), std::move(norm_mean), std::move(norm_std),
                            opts.feature_layer);
}

} // namespace reglab
