#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reglab/common.hpp"
#include "reglab/gaussian_tradeoff.hpp"
#include "reglab/nonparam.hpp"
#include "reglab/trainer.hpp"

namespace reglab {

// Config parse/validation failure; carries the offending line when known.
struct ConfigError : InvalidInput {
    explicit ConfigError(const std::string& msg, int line = 0)
        : InvalidInput(line > 0 ? "config line " + std::to_string(line) + ": " + msg
                                : "config: " + msg),
          line_number(line) {}
    int line_number;
};

struct GaussianSection {
    double mu_star = 0.0;
    double sigma2 = 1.0;
    int m = 150;
    double mu_pre = 0.1;
    SweepAxis axis = SweepAxis::Beta;
    std::string grid_spec = "linspace 0 1 101"; // explicit list or "linspace lo hi n"
    long mc_trials = 0;
    std::uint64_t seed = 1;

    GaussianSpec spec() const { return {mu_star, sigma2, m, mu_pre}; }
    std::vector<double> grid() const;
};

struct NonparamSection {
    double support_lo = 0.0;
    double support_hi = 1.0;
    std::string density = "uniform";
    std::string energy_spec = "linear 0.7 0.9"; // "linear a b" or "table PATH"
    std::vector<double> lambdas = {1.0};
    std::vector<Divergence> divergences = {Divergence::Kl, Divergence::Js};
    int quad_nodes = 1024;
    double tol = 1e-10;
    int grid_points = 513;

    DensitySpec make_density() const;
    EnergySpec1D make_energy() const;
};

struct TrainSection {
    ToyFamily family = ToyFamily::Ring8;
    int full_size = 2048;
    int limited_m = 64;
    TrainConfig train;                // lambda used for single runs
    std::vector<double> lambdas;      // nonempty selects sweep mode
    std::string extractor = "auto:pretrained"; // path | auto:pretrained | auto:random
};

struct OutputSection {
    std::string dir = "out";
    bool plot = false;
};

struct ExperimentConfig {
    std::optional<GaussianSection> gaussian;
    std::optional<NonparamSection> nonparam;
    std::optional<TrainSection> train;
    OutputSection output;

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_string(const std::string& text);

    // Full round-trippable rendering with every key explicit.
    std::string resolved() const;
};

// "linspace lo hi n" or a whitespace/comma separated list of reals.
std::vector<double> parse_grid_spec(const std::string& spec);

} // namespace reglab
