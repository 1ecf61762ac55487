#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "reglab/common.hpp"

namespace reglab {

enum class Activation { Identity, Relu, LeakyRelu, Tanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct Layer {
    Matrix w;              // out x in
    std::vector<double> b; // out
    Activation act = Activation::Identity;
};

// Dense feedforward net with value semantics. LeakyRelu uses slope 0.2.
class Network {
  public:
    Network() = default;
    // dims = {in, h1, ..., out}; acts has dims.size() - 1 entries.
    Network(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts);

    // Weights uniform on +-1/sqrt(fan_in), biases zero, reproducible from seed.
    static Network random(const std::vector<std::size_t>& dims,
                          const std::vector<Activation>& acts, std::uint64_t seed);

    std::vector<Layer> layers;

    std::size_t input_dim() const;
    std::size_t output_dim() const;
    std::size_t param_count() const;
    std::vector<std::size_t> dims() const;

    void save(std::ostream& out) const;
    static Network load(std::istream& in);
    void save_file(const std::string& path) const;
    static Network load_file(const std::string& path);
};

// Activation record of one forward pass; sufficient for an exact backward
// pass and fingerprinted against the network structure.
struct Tape {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;
    std::vector<std::size_t> dims;
    std::vector<Activation> acts;
};

std::vector<double> forward(const Network& net, std::span<const double> x,
                            Tape* tape = nullptr);

struct ParamGrads {
    std::vector<Matrix> dw;
    std::vector<std::vector<double>> db;

    static ParamGrads zeros_like(const Network& net);
    void accumulate(const ParamGrads& other);
    void scale(double s);
};

struct BackwardResult {
    ParamGrads grads;
    std::vector<double> input_grad;
};

// Exact gradients of sum(out_grad . output) for parameters and input.
// Throws InvalidInput if the tape does not match the network structure.
BackwardResult backward(const Network& net, const Tape& tape,
                        std::span<const double> out_grad);

// Accumulating variant for batch loops; input_grad may be null.
void backward_accumulate(const Network& net, const Tape& tape,
                         std::span<const double> out_grad, ParamGrads& into,
                         std::vector<double>* input_grad);

// Bias-corrected adaptive-moment update. Moment buffers are allocated on the
// first step and must then match the network for the optimizer's lifetime.
class AdamOptimizer {
  public:
    explicit AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999,
                           double eps = 1e-8);

    void step(Network& net, const ParamGrads& grads);
    long step_count() const { return t_; }

  private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

} // namespace reglab
