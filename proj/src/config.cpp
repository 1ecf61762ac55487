#include "reglab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "reglab/textio.hpp"

namespace reglab {

namespace {

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) {
        if (!tok.empty() && tok.back() == ',') {
            tok.pop_back();
        }
        if (!tok.empty()) {
            out.push_back(tok);
        }
    }
    return out;
}

double to_double(const std::string& s, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + s + "'", line);
    }
}

long to_long(const std::string& s, int line) {
    const double v = to_double(s, line);
    if (v != std::floor(v)) {
        throw ConfigError("expected an integer, got '" + s + "'", line);
    }
    return static_cast<long>(v);
}

bool to_bool(const std::string& s, int line) {
    if (s == "true" || s == "on" || s == "1") return true;
    if (s == "false" || s == "off" || s == "0") return false;
    throw ConfigError("expected true/false, got '" + s + "'", line);
}

std::vector<std::size_t> to_widths(const std::string& s, int line) {
    std::vector<std::size_t> out;
    for (const auto& tok : tokenize(s)) {
        const long v = to_long(tok, line);
        if (v < 1) {
            throw ConfigError("layer widths must be >= 1", line);
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) {
        throw ConfigError("expected at least one width", line);
    }
    return out;
}

} // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
    const auto toks = tokenize(spec);
    if (toks.empty()) {
        throw ConfigError("empty grid specification");
    }
    if (toks[0] == "linspace") {
        if (toks.size() != 4) {
            throw ConfigError("linspace needs: linspace <lo> <hi> <count>");
        }
        const double lo = to_double(toks[1], 0);
        const double hi = to_double(toks[2], 0);
        const long n = to_long(toks[3], 0);
        if (n < 2 || !(lo < hi)) {
            throw ConfigError("linspace needs lo < hi and count >= 2");
        }
        std::vector<double> grid(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) {
            grid[static_cast<std::size_t>(i)] =
                lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        }
        return grid;
    }
    std::vector<double> grid;
    for (const auto& tok : toks) {
        grid.push_back(to_double(tok, 0));
    }
    return grid;
}

std::vector<double> GaussianSection::grid() const { return parse_grid_spec(grid_spec); }

DensitySpec NonparamSection::make_density() const {
    if (density != "uniform") {
        throw ConfigError("unsupported density '" + density + "' (only: uniform)");
    }
    if (!(support_lo < support_hi)) {
        throw ConfigError("support requires lo < hi");
    }
    return DensitySpec::uniform(support_lo, support_hi, quad_nodes);
}

EnergySpec1D NonparamSection::make_energy() const {
    const auto toks = tokenize(energy_spec);
    if (toks.size() == 3 && toks[0] == "linear") {
        return EnergySpec1D::linear(to_double(toks[1], 0), to_double(toks[2], 0),
                                    support_lo, support_hi);
    }
    if (toks.size() == 2 && toks[0] == "table") {
        std::ifstream in(toks[1]);
        if (!in) {
            throw ConfigError("cannot open energy table: " + toks[1]);
        }
        std::vector<double> xs, vals;
        double x = 0.0, v = 0.0;
        char comma = ',';
        while (in >> x >> comma >> v) {
            xs.push_back(x);
            vals.push_back(v);
        }
        return EnergySpec1D::tabulated(std::move(xs), std::move(vals));
    }
    throw ConfigError("energy must be 'linear <a> <b>' or 'table <path>'");
}

namespace {

struct Parser {
    ExperimentConfig cfg;
    std::string section;
    int line_no = 0;

    void handle(const std::string& raw) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            return;
        }
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("malformed section header", line_no);
            }
            section = line.substr(1, line.size() - 2);
            if (section == "gaussian") {
                if (!cfg.gaussian) cfg.gaussian.emplace();
            } else if (section == "nonparam") {
                if (!cfg.nonparam) cfg.nonparam.emplace();
            } else if (section == "train") {
                if (!cfg.train) cfg.train.emplace();
            } else if (section == "output") {
                // defaults already present
            } else {
                throw ConfigError("unknown section [" + section + "]", line_no);
            }
            return;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value'", line_no);
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto kl = key.find_last_not_of(" \t");
        key = key.substr(0, kl + 1);
        const auto vf = value.find_first_not_of(" \t");
        value = vf == std::string::npos ? "" : value.substr(vf);
        if (key.empty() || value.empty()) {
            throw ConfigError("expected 'key = value'", line_no);
        }

        if (section == "gaussian") {
            gaussian_key(key, value);
        } else if (section == "nonparam") {
            nonparam_key(key, value);
        } else if (section == "train") {
            train_key(key, value);
        } else if (section == "output") {
            output_key(key, value);
        } else {
            throw ConfigError("key outside any section", line_no);
        }
    }

    void gaussian_key(const std::string& key, const std::string& value) {
        GaussianSection& g = *cfg.gaussian;
        if (key == "mu_star") {
            g.mu_star = to_double(value, line_no);
        } else if (key == "sigma2") {
            g.sigma2 = to_double(value, line_no);
        } else if (key == "m") {
            g.m = static_cast<int>(to_long(value, line_no));
        } else if (key == "mu_pre") {
            g.mu_pre = to_double(value, line_no);
        } else if (key == "axis") {
            if (value == "beta") {
                g.axis = SweepAxis::Beta;
            } else if (value == "sample_size") {
                g.axis = SweepAxis::SampleSize;
            } else if (value == "bias") {
                g.axis = SweepAxis::Bias;
            } else {
                throw ConfigError("axis must be beta|sample_size|bias", line_no);
            }
        } else if (key == "grid") {
            g.grid_spec = value;
        } else if (key == "mc_trials") {
            g.mc_trials = to_long(value, line_no);
        } else if (key == "seed") {
            g.seed = static_cast<std::uint64_t>(to_long(value, line_no));
        } else {
            throw ConfigError("unknown key '" + key + "' in [gaussian]", line_no);
        }
    }

    void nonparam_key(const std::string& key, const std::string& value) {
        NonparamSection& n = *cfg.nonparam;
        if (key == "support") {
            const auto toks = tokenize(value);
            if (toks.size() != 2) {
                throw ConfigError("support needs two numbers", line_no);
            }
            n.support_lo = to_double(toks[0], line_no);
            n.support_hi = to_double(toks[1], line_no);
        } else if (key == "density") {
            n.density = value;
        } else if (key == "energy") {
            n.energy_spec = value;
        } else if (key == "lambdas") {
            n.lambdas.clear();
            for (const auto& tok : tokenize(value)) {
                n.lambdas.push_back(to_double(tok, line_no));
            }
        } else if (key == "divergences") {
            n.divergences.clear();
            for (const auto& tok : tokenize(value)) {
                if (tok == "kl") {
                    n.divergences.push_back(Divergence::Kl);
                } else if (tok == "js") {
                    n.divergences.push_back(Divergence::Js);
                } else {
                    throw ConfigError("divergences must be kl|js", line_no);
                }
            }
        } else if (key == "quad_nodes") {
            n.quad_nodes = static_cast<int>(to_long(value, line_no));
        } else if (key == "tol") {
            n.tol = to_double(value, line_no);
        } else if (key == "grid_points") {
            n.grid_points = static_cast<int>(to_long(value, line_no));
        } else {
            throw ConfigError("unknown key '" + key + "' in [nonparam]", line_no);
        }
    }

    void train_key(const std::string& key, const std::string& value) {
        TrainSection& t = *cfg.train;
        if (key == "family") {
            t.family = toy_family_from_string(value);
        } else if (key == "full_size") {
            t.full_size = static_cast<int>(to_long(value, line_no));
        } else if (key == "limited_m") {
            t.limited_m = static_cast<int>(to_long(value, line_no));
        } else if (key == "latent_dim") {
            t.train.latent_dim = static_cast<int>(to_long(value, line_no));
        } else if (key == "g_widths") {
            t.train.g_widths = to_widths(value, line_no);
        } else if (key == "d_widths") {
            t.train.d_widths = to_widths(value, line_no);
        } else if (key == "lr_g") {
            t.train.lr_g = to_double(value, line_no);
        } else if (key == "lr_d") {
            t.train.lr_d = to_double(value, line_no);
        } else if (key == "batch_size") {
            t.train.batch_size = static_cast<int>(to_long(value, line_no));
        } else if (key == "lambda") {
            t.train.lambda = to_double(value, line_no);
        } else if (key == "lambdas") {
            t.lambdas.clear();
            for (const auto& tok : tokenize(value)) {
                t.lambdas.push_back(to_double(tok, line_no));
            }
        } else if (key == "steps") {
            t.train.steps = static_cast<int>(to_long(value, line_no));
        } else if (key == "eval_every") {
            t.train.eval_every = static_cast<int>(to_long(value, line_no));
        } else if (key == "eval_samples") {
            t.train.eval_samples = static_cast<int>(to_long(value, line_no));
        } else if (key == "energy_kind") {
            t.train.energy.kind = energy_kind_from_string(value);
        } else if (key == "n_mc") {
            t.train.energy.n_mc = static_cast<int>(to_long(value, line_no));
        } else if (key == "entropy_sign") {
            const long s = to_long(value, line_no);
            if (s != 1 && s != -1) {
                throw ConfigError("entropy_sign must be 1 or -1", line_no);
            }
            t.train.energy.entropy_sign = static_cast<int>(s);
        } else if (key == "extractor") {
            t.extractor = value;
        } else if (key == "seed") {
            t.train.seed = static_cast<std::uint64_t>(to_long(value, line_no));
        } else {
            throw ConfigError("unknown key '" + key + "' in [train]", line_no);
        }
    }

    void output_key(const std::string& key, const std::string& value) {
        if (key == "dir") {
            cfg.output.dir = value;
        } else if (key == "plot") {
            cfg.output.plot = to_bool(value, line_no);
        } else {
            throw ConfigError("unknown key '" + key + "' in [output]", line_no);
        }
    }
};

} // namespace

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
    Parser p;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        p.handle(line);
    }
    return std::move(p.cfg);
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

std::string ExperimentConfig::resolved() const {
    std::ostringstream out;
    if (gaussian) {
        const GaussianSection& g = *gaussian;
        out << "[gaussian]\n";
        out << "mu_star = " << fmt_double(g.mu_star) << "\n";
        out << "sigma2 = " << fmt_double(g.sigma2) << "\n";
        out << "m = " << g.m << "\n";
        out << "mu_pre = " << fmt_double(g.mu_pre) << "\n";
        out << "axis = "
            << (g.axis == SweepAxis::Beta
                    ? "beta"
                    : g.axis == SweepAxis::SampleSize ? "sample_size" : "bias")
            << "\n";
        out << "grid = " << g.grid_spec << "\n";
        out << "mc_trials = " << g.mc_trials << "\n";
        out << "seed = " << g.seed << "\n\n";
    }
    if (nonparam) {
        const NonparamSection& n = *nonparam;
        out << "[nonparam]\n";
        out << "support = " << fmt_double(n.support_lo) << " " << fmt_double(n.support_hi)
            << "\n";
        out << "density = " << n.density << "\n";
        out << "energy = " << n.energy_spec << "\n";
        out << "lambdas =";
        for (double l : n.lambdas) {
            out << " " << fmt_double(l);
        }
        out << "\n";
        out << "divergences =";
        for (Divergence d : n.divergences) {
            out << " " << to_string(d);
        }
        out << "\n";
        out << "quad_nodes = " << n.quad_nodes << "\n";
        out << "tol = " << fmt_double(n.tol) << "\n";
        out << "grid_points = " << n.grid_points << "\n\n";
    }
    if (train) {
        const TrainSection& t = *train;
        out << "[train]\n";
        out << "family = " << to_string(t.family) << "\n";
        out << "full_size = " << t.full_size << "\n";
        out << "limited_m = " << t.limited_m << "\n";
        out << "latent_dim = " << t.train.latent_dim << "\n";
        out << "g_widths =";
        for (std::size_t w : t.train.g_widths) {
            out << " " << w;
        }
        out << "\n";
        out << "d_widths =";
        for (std::size_t w : t.train.d_widths) {
            out << " " << w;
        }
        out << "\n";
        out << "lr_g = " << fmt_double(t.train.lr_g) << "\n";
        out << "lr_d = " << fmt_double(t.train.lr_d) << "\n";
        out << "batch_size = " << t.train.batch_size << "\n";
        if (t.lambdas.empty()) {
            out << "lambda = " << fmt_double(t.train.lambda) << "\n";
        } else {
            out << "lambdas =";
            for (double l : t.lambdas) {
                out << " " << fmt_double(l);
            }
            out << "\n";
        }
        out << "steps = " << t.train.steps << "\n";
        out << "eval_every = " << t.train.eval_every << "\n";
        out << "eval_samples = " << t.train.eval_samples << "\n";
        out << "energy_kind = " << to_string(t.train.energy.kind) << "\n";
        out << "n_mc = " << t.train.energy.n_mc << "\n";
        out << "entropy_sign = " << t.train.energy.entropy_sign << "\n";
        out << "extractor = " << t.extractor << "\n";
        out << "seed = " << t.train.seed << "\n\n";
    }
    out << "[output]\n";
    out << "dir = " << output.dir << "\n";
    out << "plot = " << (output.plot ? "true" : "false") << "\n";
    return out.str();
}

} // namespace reglab
