#include "reglab/trainer.hpp"

#include <cmath>
#include <limits>

#include "reglab/rng.hpp"
#include "reglab/simd/simd.hpp"

namespace reglab {

std::string to_string(ToyFamily f) {
    switch (f) {
    case ToyFamily::Ring8: return "ring8";
    case ToyFamily::TwoMoons: return "two_moons";
    case ToyFamily::GaussianGrid: return "gaussian_grid";
    }
    return "ring8";
}

ToyFamily toy_family_from_string(const std::string& name) {
    if (name == "ring8") return ToyFamily::Ring8;
    if (name == "two_moons") return ToyFamily::TwoMoons;
    if (name == "gaussian_grid") return ToyFamily::GaussianGrid;
    throw InvalidInput("unknown toy family: " + name);
}

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRingRadius = 2.0;
constexpr double kModeNoise = 0.05;
constexpr double kGridSpacing = 1.0;

// Per-point draw. `mode_rot`/`shift`/`noise_scale` let the auxiliary set
// perturb the family without duplicating the samplers.
Point2 draw_point(ToyFamily family, Rng& rng, double mode_rot, double shift,
                  double noise_scale, int* label) {
    switch (family) {
    case ToyFamily::Ring8: {
        const int mode = static_cast<int>(rng.below(8));
        const double angle = 2.0 * kPi * mode / 8.0 + mode_rot;
        const double nx = rng.normal();
        const double ny = rng.normal();
        if (label) *label = mode;
        return {kRingRadius * std::cos(angle) + shift + kModeNoise * noise_scale * nx,
                kRingRadius * std::sin(angle) + shift + kModeNoise * noise_scale * ny};
    }
    case ToyFamily::GaussianGrid: {
        const int mode = static_cast<int>(rng.below(25));
        const double cx = (mode % 5 - 2) * kGridSpacing;
        const double cy = (mode / 5 - 2) * kGridSpacing;
        const double nx = rng.normal();
        const double ny = rng.normal();
        if (label) *label = mode;
        return {cx + shift + kModeNoise * noise_scale * nx,
                cy + shift + kModeNoise * noise_scale * ny};
    }
    case ToyFamily::TwoMoons: {
        const int moon = static_cast<int>(rng.below(2));
        const double t = kPi * rng.uniform01() + mode_rot;
        const double nx = rng.normal();
        const double ny = rng.normal();
        if (label) *label = moon;
        if (moon == 0) {
            return {std::cos(t) + shift + kModeNoise * noise_scale * nx,
                    std::sin(t) + shift + kModeNoise * noise_scale * ny};
        }
        return {1.0 - std::cos(t) + shift + kModeNoise * noise_scale * nx,
                0.5 - std::sin(t) + shift + kModeNoise * noise_scale * ny};
    }
    }
    return {0.0, 0.0};
}

} // namespace

ToyDataset make_toy_dataset(ToyFamily family, int full_size, int limited_m,
                            std::uint64_t seed) {
    if (full_size < 1 || limited_m < 1 || limited_m > full_size) {
        throw InvalidInput("make_toy_dataset: need 1 <= limited_m <= full_size");
    }
    ToyDataset data;
    data.family = family;
    data.full_size = full_size;
    data.limited_m = limited_m;
    data.seed = seed;
    data.full.resize(static_cast<std::size_t>(full_size));
    for (int k = 0; k < full_size; ++k) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(k));
        data.full[static_cast<std::size_t>(k)] =
            draw_point(family, rng, 0.0, 0.0, 1.0, nullptr);
    }
    return data;
}

LabeledSet make_auxiliary_set(ToyFamily family, int n, std::uint64_t seed) {
    if (n < 1) {
        throw InvalidInput("make_auxiliary_set: n must be >= 1");
    }
    LabeledSet set;
    set.xs.reserve(static_cast<std::size_t>(n));
    set.labels.reserve(static_cast<std::size_t>(n));
    switch (family) {
    case ToyFamily::Ring8: set.n_classes = 8; break;
    case ToyFamily::GaussianGrid: set.n_classes = 25; break;
    case ToyFamily::TwoMoons: set.n_classes = 2; break;
    }
    // Rotated/shifted modes with inflated noise: related but not identical.
    const double rot = family == ToyFamily::Ring8 ? kPi / 8.0 : 0.0;
    const double shift = family == ToyFamily::GaussianGrid ? 0.25 : 0.0;
    for (int k = 0; k < n; ++k) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(k));
        int label = 0;
        const Point2 p = draw_point(family, rng, rot, shift, 1.5, &label);
        set.xs.push_back({p[0], p[1]});
        set.labels.push_back(label);
    }
    return set;
}

void subset_normalization(std::span<const Point2> pts, std::vector<double>* mean,
                          std::vector<double>* stddev) {
    if (pts.empty()) {
        throw InvalidInput("subset_normalization: empty point set");
    }
    mean->assign(2, 0.0);
    stddev->assign(2, 0.0);
    for (const auto& p : pts) {
        (*mean)[0] += p[0];
        (*mean)[1] += p[1];
    }
    (*mean)[0] /= static_cast<double>(pts.size());
    (*mean)[1] /= static_cast<double>(pts.size());
    for (const auto& p : pts) {
        const double dx = p[0] - (*mean)[0];
        const double dy = p[1] - (*mean)[1];
        (*stddev)[0] += dx * dx;
        (*stddev)[1] += dy * dy;
    }
    for (auto& s : *stddev) {
        s = std::sqrt(s / static_cast<double>(pts.size()));
        s = std::max(s, 1e-12);
    }
}

namespace {

// log sigmoid / softplus pieces of the saturating and non-saturating losses.
inline double softplus(double v) {
    return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}
inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct EnergyContext {
    const FeatureExtractor* extractor = nullptr;
    std::vector<std::vector<double>> refs; // limited training subset
};

TrainTrace train_core(const ToyDataset& data, const TrainConfig& cfg,
                      const FeatureExtractor* extractor, bool regularized) {
    if (cfg.batch_size < 2) {
        throw InvalidInput("train_gan: batch_size must be >= 2");
    }
    if (cfg.steps < 1 || cfg.eval_every < 1) {
        throw InvalidInput("train_gan: steps and eval_every must be >= 1");
    }
    if (cfg.lambda < 0.0) {
        throw InvalidInput("train_gan: lambda must be >= 0");
    }
    const bool use_energy = regularized && cfg.lambda > 0.0;
    if (use_energy && !extractor) {
        throw InvalidInput("train_gan: lambda > 0 requires a feature extractor");
    }
    if (use_energy && cfg.energy.n_mc < 1) {
        throw InvalidInput("train_gan: energy.n_mc must be >= 1");
    }

    const std::size_t latent = static_cast<std::size_t>(cfg.latent_dim);
    std::vector<std::size_t> g_dims{latent};
    g_dims.insert(g_dims.end(), cfg.g_widths.begin(), cfg.g_widths.end());
    g_dims.push_back(2);
    std::vector<Activation> g_acts(g_dims.size() - 1, Activation::LeakyRelu);
    g_acts.back() = Activation::Identity;

    std::vector<std::size_t> d_dims{2};
    d_dims.insert(d_dims.end(), cfg.d_widths.begin(), cfg.d_widths.end());
    d_dims.push_back(1);
    std::vector<Activation> d_acts(d_dims.size() - 1, Activation::LeakyRelu);
    d_acts.back() = Activation::Identity;

    Network gen = Network::random(g_dims, g_acts, Rng::derive_seed(cfg.seed, 10));
    Network disc = Network::random(d_dims, d_acts, Rng::derive_seed(cfg.seed, 11));
    AdamOptimizer g_opt(cfg.lr_g, cfg.adam_beta1, cfg.adam_beta2);
    AdamOptimizer d_opt(cfg.lr_d, cfg.adam_beta1, cfg.adam_beta2);

    Rng data_rng = Rng::stream(cfg.seed, 1);
    Rng zd_rng = Rng::stream(cfg.seed, 2);
    Rng zg_rng = Rng::stream(cfg.seed, 3);
    Rng energy_rng = Rng::stream(cfg.seed, 4); // advanced only when regularizing

    EnergyContext energy;
    if (use_energy) {
        energy.extractor = extractor;
        energy.refs.reserve(static_cast<std::size_t>(data.limited_m));
        for (const auto& p : data.limited()) {
            energy.refs.push_back({p[0], p[1]});
        }
    }

    const std::span<const Point2> limited = data.limited();
    const int batch = cfg.batch_size;
    const double inv_batch = 1.0 / static_cast<double>(batch);

    std::vector<double> z(latent);
    std::vector<std::vector<double>> mc_refs;
    TrainTrace trace;

    for (int step = 1; step <= cfg.steps; ++step) {
        // --- discriminator update ---
        ParamGrads d_grads = ParamGrads::zeros_like(disc);
        double d_loss = 0.0;
        for (int b = 0; b < batch; ++b) {
            const Point2& real =
                limited[static_cast<std::size_t>(data_rng.below(limited.size()))];
            Tape tape;
            const double logit = forward(disc, std::span(real.data(), 2), &tape)[0];
            d_loss += softplus(-logit) * inv_batch;
            const double dlogit = -sigmoid(-logit) * inv_batch;
            backward_accumulate(disc, tape, std::span(&dlogit, 1), d_grads, nullptr);
        }
        for (int b = 0; b < batch; ++b) {
            for (auto& v : z) {
                v = zd_rng.normal();
            }
            const std::vector<double> fake = forward(gen, z);
            Tape tape;
            const double logit = forward(disc, fake, &tape)[0];
            d_loss += softplus(logit) * inv_batch;
            const double dlogit = sigmoid(logit) * inv_batch;
            backward_accumulate(disc, tape, std::span(&dlogit, 1), d_grads, nullptr);
        }
        d_opt.step(disc, d_grads);

        // --- generator update (non-saturating) ---
        ParamGrads g_grads = ParamGrads::zeros_like(gen);
        double g_loss = 0.0;
        double energy_mean = 0.0;

        std::vector<Tape> g_tapes(static_cast<std::size_t>(batch));
        std::vector<std::vector<double>> fakes(static_cast<std::size_t>(batch));
        for (int b = 0; b < batch; ++b) {
            for (auto& v : z) {
                v = zg_rng.normal();
            }
            fakes[static_cast<std::size_t>(b)] =
                forward(gen, z, &g_tapes[static_cast<std::size_t>(b)]);
        }

        std::vector<std::vector<double>> x_grads(static_cast<std::size_t>(batch));
        for (int b = 0; b < batch; ++b) {
            Tape d_tape;
            const double logit =
                forward(disc, fakes[static_cast<std::size_t>(b)], &d_tape)[0];
            g_loss += softplus(-logit) * inv_batch;
            const double dlogit = -sigmoid(-logit) * inv_batch;
            x_grads[static_cast<std::size_t>(b)] =
                backward(disc, d_tape, std::span(&dlogit, 1)).input_grad;
        }

        if (use_energy) {
            const double scale = cfg.lambda * inv_batch;
            switch (cfg.energy.kind) {
            case EnergyKind::DataMse: {
                const std::size_t n_mc = static_cast<std::size_t>(cfg.energy.n_mc);
                for (int b = 0; b < batch; ++b) {
                    mc_refs.clear();
                    for (std::size_t k = 0; k < n_mc; ++k) {
                        mc_refs.push_back(
                            energy.refs[static_cast<std::size_t>(
                                energy_rng.below(energy.refs.size()))]);
                    }
                    const auto& x = fakes[static_cast<std::size_t>(b)];
                    energy_mean +=
                        energy_data_mse(x, mc_refs, *energy.extractor) * inv_batch;
                    const std::vector<double> eg =
                        energy_data_mse_grad(x, mc_refs, *energy.extractor);
                    simd::active().axpy(scale, eg.data(),
                                        x_grads[static_cast<std::size_t>(b)].data(),
                                        eg.size());
                }
                break;
            }
            case EnergyKind::FeatureMatching: {
                // Batch-level term against a fresh real batch.
                std::vector<std::vector<double>> real_batch;
                real_batch.reserve(static_cast<std::size_t>(batch));
                for (int b = 0; b < batch; ++b) {
                    const Point2& p = limited[static_cast<std::size_t>(
                        energy_rng.below(limited.size()))];
                    real_batch.push_back({p[0], p[1]});
                }
                energy_mean =
                    feature_matching_loss(real_batch, fakes, *energy.extractor);
                const auto fm_grads = feature_matching_grad_fake(
                    real_batch, fakes, *energy.extractor);
                for (int b = 0; b < batch; ++b) {
                    simd::active().axpy(cfg.lambda,
                                        fm_grads[static_cast<std::size_t>(b)].data(),
                                        x_grads[static_cast<std::size_t>(b)].data(),
                                        fm_grads[static_cast<std::size_t>(b)].size());
                }
                break;
            }
            case EnergyKind::EntropyMin: {
                for (int b = 0; b < batch; ++b) {
                    const auto& x = fakes[static_cast<std::size_t>(b)];
                    energy_mean += energy_entropy(x, *energy.extractor,
                                                  cfg.energy.entropy_sign) *
                                   inv_batch;
                    const std::vector<double> eg = energy_entropy_grad(
                        x, *energy.extractor, cfg.energy.entropy_sign);
                    simd::active().axpy(scale, eg.data(),
                                        x_grads[static_cast<std::size_t>(b)].data(),
                                        eg.size());
                }
                break;
            }
            }
        }

        for (int b = 0; b < batch; ++b) {
            backward_accumulate(gen, g_tapes[static_cast<std::size_t>(b)],
                                x_grads[static_cast<std::size_t>(b)], g_grads,
                                nullptr);
        }
        g_opt.step(gen, g_grads);

        if (!std::isfinite(d_loss) || !std::isfinite(g_loss) ||
            !std::isfinite(energy_mean)) {
            throw NumericalError("train_gan: non-finite loss at step " +
                                 std::to_string(step));
        }

        if (step % cfg.eval_every == 0 || step == cfg.steps) {
            const std::vector<Point2> samples =
                sample_generator(gen, cfg.eval_samples,
                                 Rng::derive_seed(cfg.seed, 1000 + step));
            const Mmd2Result m = mmd2(data.full, samples);
            const double fd = frechet_gaussian(data.full, samples);
            if (!std::isfinite(m.unbiased) || !std::isfinite(fd)) {
                throw NumericalError("train_gan: non-finite metric at step " +
                                     std::to_string(step));
            }
            trace.rows.push_back({step, d_loss, g_loss, energy_mean, m.unbiased, fd});
        }
    }

    trace.generator = std::move(gen);
    trace.discriminator = std::move(disc);
    return trace;
}

} // namespace

TrainTrace train_gan(const ToyDataset& data, const TrainConfig& cfg,
                     const FeatureExtractor* extractor) {
    return train_core(data, cfg, extractor, true);
}

TrainTrace train_gan(const ToyDataset& data, const TrainConfig& cfg) {
    if (cfg.lambda > 0.0) {
        if (cfg.extractor_path.empty()) {
            throw InvalidInput("train_gan: lambda > 0 requires extractor_path");
        }
        const FeatureExtractor extractor =
            FeatureExtractor::load_file(cfg.extractor_path);
        return train_core(data, cfg, &extractor, true);
    }
    return train_core(data, cfg, nullptr, true);
}

TrainTrace train_baseline(const ToyDataset& data, const TrainConfig& cfg) {
    return train_core(data, cfg, nullptr, false);
}

double fit_gaussian_gd(const GaussianSpec& spec, std::span<const double> sample,
                       double lambda, double lr, int steps) {
    if (sample.empty()) {
        throw InvalidInput("fit_gaussian_gd: empty sample");
    }
    if (!(lambda >= 0.0) || !(lr > 0.0) || steps < 1) {
        throw InvalidInput("fit_gaussian_gd: bad lambda/lr/steps");
    }
    const double mean =
        simd::active().sum(sample.data(), sample.size()) / static_cast<double>(sample.size());
    double mu = spec.mu_pre;
    for (int t = 0; t < steps; ++t) {
        const double grad = ((mu - mean) + lambda * (mu - spec.mu_pre)) / spec.sigma2;
        mu -= lr * grad;
        if (!std::isfinite(mu) || std::abs(mu) > 1e12) {
            throw NumericalError("fit_gaussian_gd: divergent iterate at step " +
                                 std::to_string(t + 1));
        }
    }
    return mu;
}

std::vector<Point2> sample_generator(const Network& generator, int n,
                                     std::uint64_t seed) {
    if (n < 0) {
        throw InvalidInput("sample_generator: n must be >= 0");
    }
    std::vector<Point2> out;
    out.reserve(static_cast<std::size_t>(n));
    Rng rng(seed);
    std::vector<double> z(generator.input_dim());
    for (int i = 0; i < n; ++i) {
        for (auto& v : z) {
            v = rng.normal();
        }
        const std::vector<double> x = forward(generator, z);
        out.push_back({x[0], x[1]});
    }
    return out;
}

} // namespace reglab
