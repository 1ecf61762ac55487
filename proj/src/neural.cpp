#include "reglab/neural.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "reglab/rng.hpp"
#include "reglab/simd/simd.hpp"

namespace reglab {

std::string to_string(Activation a) {
    switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::LeakyRelu: return "leaky_relu";
    case Activation::Tanh: return "tanh";
    }
    return "identity";
}

Activation activation_from_string(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "relu") return Activation::Relu;
    if (name == "leaky_relu") return Activation::LeakyRelu;
    if (name == "tanh") return Activation::Tanh;
    throw InvalidInput("unknown activation: " + name);
}

namespace {

constexpr double kLeakySlope = 0.2;

inline double activate(Activation a, double pre) {
    switch (a) {
    case Activation::Identity: return pre;
    case Activation::Relu: return pre > 0.0 ? pre : 0.0;
    case Activation::LeakyRelu: return pre > 0.0 ? pre : kLeakySlope * pre;
    case Activation::Tanh: return std::tanh(pre);
    }
    return pre;
}

// Derivative written in terms of pre-activation and the stored post value
// (tanh reuses post to avoid recomputation).
inline double activate_grad(Activation a, double pre, double post) {
    switch (a) {
    case Activation::Identity: return 1.0;
    case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::LeakyRelu: return pre > 0.0 ? 1.0 : kLeakySlope;
    case Activation::Tanh: return 1.0 - post * post;
    }
    return 1.0;
}

void check_structure(const std::vector<std::size_t>& dims,
                     const std::vector<Activation>& acts) {
    if (dims.size() < 2) {
        throw InvalidInput("Network: need at least input and output dims");
    }
    if (acts.size() != dims.size() - 1) {
        throw InvalidInput("Network: need one activation per layer");
    }
    for (std::size_t d : dims) {
        if (d == 0) {
            throw InvalidInput("Network: zero-sized layer");
        }
    }
}

} // namespace

Network::Network(const std::vector<std::size_t>& dims,
                 const std::vector<Activation>& acts) {
    check_structure(dims, acts);
    layers.resize(dims.size() - 1);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        layers[l].w = Matrix(dims[l + 1], dims[l]);
        layers[l].b.assign(dims[l + 1], 0.0);
        layers[l].act = acts[l];
    }
}

Network Network::random(const std::vector<std::size_t>& dims,
                        const std::vector<Activation>& acts, std::uint64_t seed) {
    Network net(dims, acts);
    Rng rng(seed);
    for (auto& layer : net.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.w.cols));
        for (auto& w : layer.w.data) {
            w = rng.uniform(-bound, bound);
        }
    }
    return net;
}

std::size_t Network::input_dim() const { return layers.front().w.cols; }
std::size_t Network::output_dim() const { return layers.back().w.rows; }

std::size_t Network::param_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) {
        n += layer.w.data.size() + layer.b.size();
    }
    return n;
}

std::vector<std::size_t> Network::dims() const {
    std::vector<std::size_t> d;
    d.push_back(input_dim());
    for (const auto& layer : layers) {
        d.push_back(layer.w.rows);
    }
    return d;
}

std::vector<double> forward(const Network& net, std::span<const double> x, Tape* tape) {
    if (net.layers.empty()) {
        throw InvalidInput("forward: empty network");
    }
    if (x.size() != net.input_dim()) {
        throw InvalidInput("forward: input dimension mismatch");
    }
    const auto& kernels = simd::active();

    std::vector<double> cur(x.begin(), x.end());
    if (tape) {
        tape->input = cur;
        tape->pre.clear();
        tape->post.clear();
        tape->dims = net.dims();
        tape->acts.clear();
        for (const auto& layer : net.layers) {
            tape->acts.push_back(layer.act);
        }
    }
    std::vector<double> pre;
    for (const auto& layer : net.layers) {
        pre.resize(layer.w.rows);
        kernels.matvec(layer.w.data.data(), cur.data(), layer.b.data(), pre.data(),
                       layer.w.rows, layer.w.cols);
        std::vector<double> post(layer.w.rows);
        for (std::size_t i = 0; i < post.size(); ++i) {
            post[i] = activate(layer.act, pre[i]);
        }
        if (tape) {
            tape->pre.push_back(pre);
            tape->post.push_back(post);
        }
        cur = std::move(post);
    }
    return cur;
}

ParamGrads ParamGrads::zeros_like(const Network& net) {
    ParamGrads g;
    g.dw.reserve(net.layers.size());
    g.db.reserve(net.layers.size());
    for (const auto& layer : net.layers) {
        g.dw.emplace_back(layer.w.rows, layer.w.cols);
        g.db.emplace_back(layer.b.size(), 0.0);
    }
    return g;
}

void ParamGrads::accumulate(const ParamGrads& other) {
    for (std::size_t l = 0; l < dw.size(); ++l) {
        simd::active().axpy(1.0, other.dw[l].data.data(), dw[l].data.data(),
                            dw[l].data.size());
        simd::active().axpy(1.0, other.db[l].data(), db[l].data(), db[l].size());
    }
}

void ParamGrads::scale(double s) {
    for (auto& m : dw) {
        for (auto& v : m.data) {
            v *= s;
        }
    }
    for (auto& b : db) {
        for (auto& v : b) {
            v *= s;
        }
    }
}

namespace {

void check_tape(const Network& net, const Tape& tape) {
    const auto dims = net.dims();
    if (tape.dims != dims || tape.acts.size() != net.layers.size() ||
        tape.pre.size() != net.layers.size() || tape.post.size() != net.layers.size()) {
        throw InvalidInput("backward: tape does not match network structure");
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (tape.acts[l] != net.layers[l].act) {
            throw InvalidInput("backward: tape does not match network activations");
        }
    }
}

} // namespace

void backward_accumulate(const Network& net, const Tape& tape,
                         std::span<const double> out_grad, ParamGrads& into,
                         std::vector<double>* input_grad) {
    check_tape(net, tape);
    if (out_grad.size() != net.output_dim()) {
        throw InvalidInput("backward: out_grad dimension mismatch");
    }
    const auto& kernels = simd::active();

    std::vector<double> g(out_grad.begin(), out_grad.end());
    std::vector<double> g_pre;
    std::vector<double> g_prev;
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const Layer& layer = net.layers[li];
        g_pre.resize(layer.w.rows);
        for (std::size_t i = 0; i < g_pre.size(); ++i) {
            g_pre[i] = g[i] * activate_grad(layer.act, tape.pre[li][i], tape.post[li][i]);
        }
        const std::vector<double>& layer_input = li == 0 ? tape.input : tape.post[li - 1];
        kernels.ger(into.dw[li].data.data(), g_pre.data(), layer_input.data(),
                    layer.w.rows, layer.w.cols);
        kernels.axpy(1.0, g_pre.data(), into.db[li].data(), g_pre.size());

        if (li > 0 || input_grad) {
            g_prev.resize(layer.w.cols);
            kernels.matvec_t(layer.w.data.data(), g_pre.data(), g_prev.data(),
                             layer.w.rows, layer.w.cols);
            g = g_prev;
        }
    }
    if (input_grad) {
        *input_grad = std::move(g);
    }
}

BackwardResult backward(const Network& net, const Tape& tape,
                        std::span<const double> out_grad) {
    BackwardResult result;
    result.grads = ParamGrads::zeros_like(net);
    backward_accumulate(net, tape, out_grad, result.grads, &result.input_grad);
    return result;
}

AdamOptimizer::AdamOptimizer(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    if (!(lr > 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) ||
        !(eps > 0.0)) {
        throw InvalidInput("AdamOptimizer: invalid hyperparameters");
    }
}

void AdamOptimizer::step(Network& net, const ParamGrads& grads) {
    const std::size_t n = net.param_count();
    if (m_.empty()) {
        m_.assign(n, 0.0);
        v_.assign(n, 0.0);
    } else if (m_.size() != n) {
        throw InvalidInput("AdamOptimizer: network size changed under the optimizer");
    }
    ++t_;
    const double corr1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double corr2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));

    std::size_t idx = 0;
    auto update = [&](double* params, const double* g, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i, ++idx) {
            const double gi = g[i];
            if (!std::isfinite(gi)) {
                throw NumericalError("AdamOptimizer: non-finite gradient at step " +
                                     std::to_string(t_));
            }
            m_[idx] = beta1_ * m_[idx] + (1.0 - beta1_) * gi;
            v_[idx] = beta2_ * v_[idx] + (1.0 - beta2_) * gi * gi;
            const double mhat = m_[idx] / corr1;
            const double vhat = v_[idx] / corr2;
            params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        update(net.layers[l].w.data.data(), grads.dw[l].data.data(),
               grads.dw[l].data.size());
        update(net.layers[l].b.data(), grads.db[l].data(), grads.db[l].size());
    }
}

// --- serialization -----------------------------------------------------------
//
// Text format, one parameter per line in C hexfloat so round trips are
// bit-exact:
//   reglab-net 1
//   layers <L>
//   layer <in> <out> <activation>   (repeated L times)
//   params <count>
//   <hexfloat>                      (W row-major then b, layer by layer)
//   end

namespace {

std::string hexfloat(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_hexfloat(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw InvalidInput("weight file: bad parameter value '" + s + "'");
    }
}

} // namespace

void Network::save(std::ostream& out) const {
    out << "reglab-net 1\n";
    out << "layers " << layers.size() << "\n";
    for (const auto& layer : layers) {
        out << "layer " << layer.w.cols << " " << layer.w.rows << " "
            << to_string(layer.act) << "\n";
    }
    out << "params " << param_count() << "\n";
    for (const auto& layer : layers) {
        for (double v : layer.w.data) {
            out << hexfloat(v) << "\n";
        }
        for (double v : layer.b) {
            out << hexfloat(v) << "\n";
        }
    }
    out << "end\n";
}

Network Network::load(std::istream& in) {
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "reglab-net" || version != 1) {
        throw InvalidInput("weight file: bad header");
    }
    std::size_t n_layers = 0;
    in >> tag >> n_layers;
    if (tag != "layers" || n_layers == 0) {
        throw InvalidInput("weight file: bad layer count");
    }
    std::vector<std::size_t> dims;
    std::vector<Activation> acts;
    for (std::size_t l = 0; l < n_layers; ++l) {
        std::size_t in_dim = 0, out_dim = 0;
        std::string act_name;
        in >> tag >> in_dim >> out_dim >> act_name;
        if (tag != "layer" || in_dim == 0 || out_dim == 0) {
            throw InvalidInput("weight file: bad layer line");
        }
        if (l == 0) {
            dims.push_back(in_dim);
        } else if (dims.back() != in_dim) {
            throw InvalidInput("weight file: inconsistent layer dims");
        }
        dims.push_back(out_dim);
        acts.push_back(activation_from_string(act_name));
    }
    Network net(dims, acts);
    std::size_t count = 0;
    in >> tag >> count;
    if (tag != "params" || count != net.param_count()) {
        throw InvalidInput("weight file: parameter count mismatch");
    }
    std::string token;
    for (auto& layer : net.layers) {
        for (auto& v : layer.w.data) {
            in >> token;
            v = parse_hexfloat(token);
        }
        for (auto& v : layer.b) {
            in >> token;
            v = parse_hexfloat(token);
        }
    }
    in >> token;
    if (token != "end") {
        throw InvalidInput("weight file: missing end marker");
    }
    return net;
}

void Network::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("cannot open for writing: " + path);
    }
    save(out);
}

Network Network::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open for reading: " + path);
    }
    return load(in);
}

} // namespace reglab
