// Command-line front end: config-driven, seeded experiments with CSV outputs
// and optional SVG plots. Exit codes: 0 success, 2 config error, 3 numerical
// failure, 4 infeasible or degenerate problem.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "reglab/config.hpp"
#include "reglab/energy.hpp"
#include "reglab/gaussian_tradeoff.hpp"
#include "reglab/metrics.hpp"
#include "reglab/nonparam.hpp"
#include "reglab/rng.hpp"
#include "reglab/svg.hpp"
#include "reglab/textio.hpp"
#include "reglab/trainer.hpp"

namespace fs = std::filesystem;
using namespace reglab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInfeasible = 4;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<long> seed;
    int jobs = 1;
    bool plot = false;
};

ExperimentConfig load_config(const CliOptions& opts) {
    ExperimentConfig cfg = ExperimentConfig::parse_file(opts.config_path);
    if (!opts.out_dir.empty()) {
        cfg.output.dir = opts.out_dir;
    }
    if (opts.plot) {
        cfg.output.plot = true;
    }
    if (opts.seed) {
        const auto s = static_cast<std::uint64_t>(*opts.seed);
        if (cfg.gaussian) {
            cfg.gaussian->seed = s;
        }
        if (cfg.train) {
            cfg.train->train.seed = s;
        }
    }
    return cfg;
}

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output.dir);
    fs::create_directories(dir);
    std::ofstream resolved(dir / "config_resolved.ini");
    resolved << cfg.resolved();
    return dir;
}

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("cannot open for writing: " + path.string());
    }
    return out;
}

// Runs `count` independent tasks on up to `jobs` threads; rethrows the first
// failure after all workers join.
void run_parallel(int jobs, std::size_t count,
                  const std::function<void(std::size_t)>& task) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    const int workers = static_cast<int>(std::min<std::size_t>(jobs, count));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

// --- gaussian-sweep ----------------------------------------------------------

int cmd_gaussian_sweep(const CliOptions& opts) {
    ExperimentConfig cfg = load_config(opts);
    if (!cfg.gaussian) {
        throw ConfigError("gaussian-sweep requires a [gaussian] section");
    }
    const GaussianSection& g = *cfg.gaussian;
    const GaussianSpec spec = g.spec();

    const BetaInterval interval = admissible_beta_interval(spec);
    if (interval.degenerate) {
        std::cerr << "DegenerateInterval: the admissible beta interval is empty "
                     "(mu_pre equals mu_star); no tradeoff to sweep\n";
        return kExitInfeasible;
    }

    const std::vector<double> grid = g.grid();
    const std::vector<SweepRow> rows =
        sweep(spec, g.axis, grid, g.mc_trials, g.seed, opts.jobs);

    const fs::path dir = prepare_out_dir(cfg);
    std::ofstream out = open_csv(dir / "gaussian_sweep.csv");
    out << "axis_value,beta,lambda,mse_reg_cf,mse_mle_cf,mse_pre_cf,mse_reg_mc,stderr\n";
    for (const SweepRow& row : rows) {
        out << fmt_double(row.axis_value) << "," << fmt_double(row.beta) << ","
            << fmt_double(row.lambda) << "," << fmt_double(row.mse_reg_cf) << ","
            << fmt_double(row.mse_mle_cf) << "," << fmt_double(row.mse_pre_cf) << ",";
        if (row.has_mc) {
            out << fmt_double(row.mse_reg_mc) << "," << fmt_double(row.mc_std_error);
        } else {
            out << ",";
        }
        out << "\n";
    }
    out.close();

    if (cfg.output.plot) {
        PlotSeries reg{"interpolated", {}, {}, "#1f77b4", false};
        PlotSeries mle{"sample mean", {}, {}, "#2ca02c", false};
        PlotSeries pre{"external guess", {}, {}, "#ff7f0e", false};
        for (const auto& row : rows) {
            reg.x.push_back(row.axis_value);
            reg.y.push_back(row.mse_reg_cf);
            mle.x.push_back(row.axis_value);
            mle.y.push_back(row.mse_mle_cf);
            pre.x.push_back(row.axis_value);
            pre.y.push_back(row.mse_pre_cf);
        }
        std::vector<PlotSeries> series{reg, mle, pre};
        if (g.axis == SweepAxis::Beta) {
            const TradeoffPoint at_lo = mse_closed_form(spec, interval.lo);
            const TradeoffPoint at_hi = mse_closed_form(spec, interval.hi);
            series.push_back(
                {"interval lo", {interval.lo}, {at_lo.mse_reg}, "#d62728", true});
            series.push_back(
                {"interval hi", {interval.hi}, {at_hi.mse_reg}, "#000000", true});
        }
        const std::string xlabel =
            g.axis == SweepAxis::Beta
                ? "beta"
                : g.axis == SweepAxis::SampleSize ? "sample size" : "bias";
        write_svg_plot((dir / "gaussian_sweep.svg").string(), "estimator MSE", xlabel,
                       "MSE", series);
    }
    std::cout << "gaussian-sweep: wrote " << rows.size() << " rows to "
              << (dir / "gaussian_sweep.csv").string() << "\n";
    return kExitOk;
}

// --- nonparam ----------------------------------------------------------------

int cmd_nonparam(const CliOptions& opts) {
    ExperimentConfig cfg = load_config(opts);
    if (!cfg.nonparam) {
        throw ConfigError("nonparam requires a [nonparam] section");
    }
    const NonparamSection& n = *cfg.nonparam;
    const DensitySpec density = n.make_density();
    const EnergySpec1D energy = n.make_energy();

    struct Task {
        Divergence div;
        double lambda;
    };
    std::vector<Task> tasks;
    for (Divergence div : n.divergences) {
        for (double lambda : n.lambdas) {
            tasks.push_back({div, lambda});
        }
    }
    std::vector<std::optional<SolveResult>> results(tasks.size());
    std::vector<std::string> failures(tasks.size());

    run_parallel(opts.jobs, tasks.size(), [&](std::size_t i) {
        try {
            results[i] = solve_alpha(density, energy, tasks[i].div, tasks[i].lambda,
                                     n.tol, n.grid_points);
        } catch (const NoFeasibleRoot& e) {
            failures[i] = e.what();
        } catch (const InfeasibleAlpha& e) {
            failures[i] = e.what();
        }
    });

    const fs::path dir = prepare_out_dir(cfg);
    std::ofstream summary = open_csv(dir / "nonparam_summary.csv");
    summary << "divergence,lambda,alpha_star,residual\n";

    bool any_failed = false;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::string tag =
            to_string(tasks[i].div) + "_lambda" + fmt_double(tasks[i].lambda);
        if (!results[i]) {
            any_failed = true;
            std::cerr << "nonparam: solve failed for " << tag << ": " << failures[i]
                      << "\n";
            continue;
        }
        const SolveResult& r = *results[i];
        summary << to_string(r.divergence) << "," << fmt_double(r.lambda) << ","
                << fmt_double(r.alpha_star) << "," << fmt_double(r.residual) << "\n";
        std::ofstream out = open_csv(dir / ("nonparam_" + tag + ".csv"));
        out << "x,p_d,energy,weight,p_g_star\n";
        for (std::size_t k = 0; k < r.grid_x.size(); ++k) {
            out << fmt_double(r.grid_x[k]) << "," << fmt_double(r.grid_pd[k]) << ","
                << fmt_double(r.grid_energy[k]) << "," << fmt_double(r.grid_weight[k])
                << "," << fmt_double(r.grid_pg[k]) << "\n";
        }
    }
    summary.close();

    if (cfg.output.plot) {
        for (Divergence div : n.divergences) {
            std::vector<PlotSeries> series;
            bool have_pd = false;
            const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                    "#d62728", "#9467bd", "#8c564b"};
            std::size_t color_idx = 0;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                if (tasks[i].div != div || !results[i]) {
                    continue;
                }
                const SolveResult& r = *results[i];
                if (!have_pd) {
                    series.push_back(
                        {"data density", r.grid_x, r.grid_pd, "#7f7f7f", false});
                    have_pd = true;
                }
                series.push_back({"lambda=" + fmt_double(r.lambda), r.grid_x,
                                  r.grid_pg, colors[color_idx % 6], false});
                ++color_idx;
            }
            if (!series.empty()) {
                write_svg_plot((dir / ("nonparam_" + to_string(div) + ".svg")).string(),
                               "reweighted optimum (" + to_string(div) + ")", "x",
                               "density", series);
            }
        }
    }
    std::cout << "nonparam: wrote summary to "
              << (dir / "nonparam_summary.csv").string() << "\n";
    return any_failed ? kExitInfeasible : kExitOk;
}

// --- train -------------------------------------------------------------------

void write_trace_csv(const fs::path& path, const TrainTrace& trace) {
    std::ofstream out = open_csv(path);
    out << "step,d_loss,g_loss,energy_mean,mmd2,frechet\n";
    for (const TraceRow& row : trace.rows) {
        out << row.step << "," << fmt_double(row.d_loss) << ","
            << fmt_double(row.g_loss) << "," << fmt_double(row.energy_mean) << ","
            << fmt_double(row.mmd2) << "," << fmt_double(row.frechet) << "\n";
    }
}

// Resolves the extractor reference: a weight-file path, or auto:random /
// auto:pretrained built deterministically from the train seed with the
// limited subset's normalization stats and saved next to the outputs.
std::string resolve_extractor(const TrainSection& t, const ToyDataset& data,
                              const fs::path& dir) {
    if (t.extractor != "auto:random" && t.extractor != "auto:pretrained") {
        if (!fs::exists(t.extractor)) {
            throw InvalidInput("extractor file not found: " + t.extractor);
        }
        return t.extractor;
    }
    std::vector<double> mean, stddev;
    subset_normalization(data.limited(), &mean, &stddev);
    const fs::path path = dir / "extractor.txt";
    if (t.extractor == "auto:random") {
        FeatureExtractor::random({2, 32, 32, 8}, Rng::derive_seed(t.train.seed, 900),
                                 mean, stddev)
            .save_file(path.string());
    } else {
        const LabeledSet aux =
            make_auxiliary_set(t.family, 4096, Rng::derive_seed(t.train.seed, 901));
        train_classifier_extractor(aux.xs, aux.labels, aux.n_classes, mean, stddev,
                                   ClassifierTrainOptions{},
                                   Rng::derive_seed(t.train.seed, 902))
            .save_file(path.string());
    }
    return path.string();
}

int cmd_train(const CliOptions& opts) {
    ExperimentConfig cfg = load_config(opts);
    if (!cfg.train) {
        throw ConfigError("train requires a [train] section");
    }
    const TrainSection& t = *cfg.train;
    const ToyDataset data =
        make_toy_dataset(t.family, t.full_size, t.limited_m, t.train.seed);
    const fs::path dir = prepare_out_dir(cfg);

    std::vector<double> lambdas =
        t.lambdas.empty() ? std::vector<double>{t.train.lambda} : t.lambdas;
    const bool needs_extractor =
        std::any_of(lambdas.begin(), lambdas.end(), [](double l) { return l > 0.0; });

    std::string extractor_path;
    if (needs_extractor) {
        extractor_path = resolve_extractor(t, data, dir);
    }

    std::vector<TrainTrace> traces(lambdas.size());
    run_parallel(opts.jobs, lambdas.size(), [&](std::size_t i) {
        TrainConfig run_cfg = t.train;
        run_cfg.lambda = lambdas[i];
        run_cfg.extractor_path = run_cfg.lambda > 0.0 ? extractor_path : "";
        traces[i] = train_gan(data, run_cfg);
    });

    if (t.lambdas.empty()) {
        write_trace_csv(dir / "train_trace.csv", traces[0]);
        traces[0].generator.save_file((dir / "generator.txt").string());
        traces[0].discriminator.save_file((dir / "discriminator.txt").string());
    } else {
        std::ofstream summary = open_csv(dir / "train_summary.csv");
        summary << "lambda,final_mmd2,final_frechet\n";
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            const std::string tag = "lambda" + fmt_double(lambdas[i]);
            write_trace_csv(dir / ("train_trace_" + tag + ".csv"), traces[i]);
            traces[i].generator.save_file(
                (dir / ("generator_" + tag + ".txt")).string());
            const TraceRow& last = traces[i].rows.back();
            summary << fmt_double(lambdas[i]) << "," << fmt_double(last.mmd2) << ","
                    << fmt_double(last.frechet) << "\n";
        }
    }

    if (cfg.output.plot) {
        std::vector<PlotSeries> series;
        const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2"};
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            PlotSeries s{"lambda=" + fmt_double(lambdas[i]), {}, {}, colors[i % 7],
                         false};
            for (const TraceRow& row : traces[i].rows) {
                s.x.push_back(row.step);
                s.y.push_back(row.mmd2);
            }
            series.push_back(std::move(s));
        }
        write_svg_plot((dir / "train_mmd2.svg").string(), "MMD^2 over training",
                       "step", "MMD^2 (unbiased)", series);
    }
    std::cout << "train: finished " << lambdas.size() << " run(s), outputs in "
              << dir.string() << "\n";
    return kExitOk;
}

// --- metrics -----------------------------------------------------------------

std::vector<Point2> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open point file: " + path);
    }
    std::vector<Point2> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream iss(line);
        double x = 0.0, y = 0.0;
        if (iss >> x >> y) {
            pts.push_back({x, y});
        }
        // non-numeric lines (headers) are skipped
    }
    if (pts.empty()) {
        throw InvalidInput("no 2-D points found in " + path);
    }
    return pts;
}

int cmd_metrics(const std::string& real_path, const std::string& fake_path) {
    const std::vector<Point2> real = read_points_csv(real_path);
    const std::vector<Point2> fake = read_points_csv(fake_path);
    const MetricReport report = metric_report(real, fake);
    std::cout << "mmd2_unbiased,mmd2_biased,frechet,bandwidth,n_real,n_fake\n";
    std::cout << fmt_double(report.mmd2_unbiased) << ","
              << fmt_double(report.mmd2_biased) << "," << fmt_double(report.frechet)
              << "," << fmt_double(report.bandwidth) << "," << report.n_real << ","
              << report.n_fake << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical experiments: estimator tradeoffs, reweighted optima, "
                 "regularized 2-D GAN training"};
    app.require_subcommand(1);

    CliOptions opts;
    std::string metrics_real, metrics_fake;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "experiment config file")
            ->required();
        sub->add_option("--out", opts.out_dir, "output directory (overrides config)");
        sub->add_option("--seed", opts.seed, "seed override");
        sub->add_option("--jobs", opts.jobs, "parallel workers for sweeps")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--plot", opts.plot, "also write SVG plots");
    };

    CLI::App* sweep_cmd =
        app.add_subcommand("gaussian-sweep", "closed-form + Monte Carlo MSE sweep");
    add_common(sweep_cmd);
    CLI::App* nonparam_cmd = app.add_subcommand(
        "nonparam", "reweighted global optimum per (divergence, lambda)");
    add_common(nonparam_cmd);
    CLI::App* train_cmd = app.add_subcommand("train", "regularized 2-D GAN training");
    add_common(train_cmd);
    CLI::App* metrics_cmd =
        app.add_subcommand("metrics", "two-sample metrics between two point files");
    metrics_cmd->add_option("real", metrics_real, "CSV of real points")->required();
    metrics_cmd->add_option("fake", metrics_fake, "CSV of generated points")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep_cmd->parsed()) {
            return cmd_gaussian_sweep(opts);
        }
        if (nonparam_cmd->parsed()) {
            return cmd_nonparam(opts);
        }
        if (train_cmd->parsed()) {
            return cmd_train(opts);
        }
        if (metrics_cmd->parsed()) {
            return cmd_metrics(metrics_real, metrics_fake);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InfeasibleAlpha& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const NoFeasibleRoot& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const QuadratureUnstable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
