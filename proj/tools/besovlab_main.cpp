#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "besovlab/besov.hpp"
#include "besovlab/experiment.hpp"
#include "besovlab/local_time.hpp"
#include "besovlab/report.hpp"
#include "besovlab/rng.hpp"
#include "besovlab/she.hpp"
#include "besovlab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace besovlab;

namespace {

struct Opts {
    std::string config;
    std::string out;
    long long seed = -1;  // -1: keep config value
    int replicates = -1;
    bool quiet = false;
    double bin_width = 0.0;
    std::size_t t_stride = 0;
    int cases = 200;
};

void add_common(CLI::App* sub, Opts& o) {
    sub->add_option("--config", o.config, "JSON experiment config");
    sub->add_option("--seed", o.seed, "Override config seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--replicates", o.replicates, "Override replicate count");
    sub->add_flag("--quiet", o.quiet, "Suppress progress output");
}

ExperimentConfig base_config(const Opts& o) {
    ExperimentConfig cfg;
    if (o.config.empty()) {
        cfg = config_from_json(json{{"kind", "Bm"}});
    } else {
        cfg = load_config(o.config);
    }
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    if (o.replicates > 0) cfg.n_replicates = o.replicates;
    if (!o.out.empty()) cfg.out_dir = o.out;
    return cfg;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("I/O error: cannot create directory " + dir);
}

SamplePath draw_path(const ExperimentConfig& cfg, int replicate) {
    if (cfg.descriptor.kind == ProcessKind::She)
        return solve_she(cfg.descriptor, cfg.grid, cfg.seed,
                         static_cast<std::uint64_t>(replicate));
    PathSampler sampler(cfg.descriptor, cfg.grid, cfg.sampler);
    return sampler.draw(cfg.seed, static_cast<std::uint64_t>(replicate));
}

void write_json(const json& j, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("I/O error: cannot write " + file);
    out << j.dump(2) << "\n";
}

int cmd_simulate(const Opts& o) {
    ExperimentConfig cfg = base_config(o);
    ensure_dir(cfg.out_dir);
    json meta;
    meta["descriptor"] = cfg.descriptor.label();
    meta["seed"] = cfg.seed;
    meta["n_replicates"] = cfg.n_replicates;
    meta["version"] = kVersion;
    json files = json::array();
    const bool she = cfg.descriptor.kind == ProcessKind::She;
    std::unique_ptr<PathSampler> sampler;
    if (!she) sampler = std::make_unique<PathSampler>(cfg.descriptor, cfg.grid, cfg.sampler);
    for (int r = 0; r < cfg.n_replicates; ++r) {
        SamplePath path = she ? solve_she(cfg.descriptor, cfg.grid, cfg.seed,
                                          static_cast<std::uint64_t>(r))
                              : sampler->draw(cfg.seed, static_cast<std::uint64_t>(r));
        const std::string name = "path_r" + std::to_string(r) + ".csv";
        write_path_csv(path, (fs::path(cfg.out_dir) / name).string());
        files.push_back({{"name", name}, {"covariance_fallback", path.covariance_fallback}});
    }
    meta["files"] = files;
    write_json(meta, (fs::path(cfg.out_dir) / "simulate.json").string());
    if (!o.quiet)
        std::printf("simulate: wrote %d path(s) for %s to %s\n", cfg.n_replicates,
                    cfg.descriptor.label().c_str(), cfg.out_dir.c_str());
    return 0;
}

int cmd_localtime(const Opts& o) {
    ExperimentConfig cfg = base_config(o);
    const double ad = cfg.descriptor.alpha() * cfg.descriptor.d;
    if (!(ad < 1.0))
        throw ValidationError(
            "localtime: local-time regularity requires alpha * d < 1, got alpha * d = " +
            std::to_string(ad));
    ensure_dir(cfg.out_dir);
    SamplePath path = draw_path(cfg, 0);
    double width = o.bin_width;
    if (width <= 0.0) width = cfg.localtime.bin_width;
    if (width <= 0.0) width = default_bin_width(path);
    LocalTimeField field = local_time_field(path, width);
    std::size_t stride = o.t_stride;
    if (stride == 0) stride = std::max<std::size_t>(1, (field.n_times() - 1) / 1024);
    write_field_csv(field, (fs::path(cfg.out_dir) / "localtime.csv").string(), stride);

    const double t_end = cfg.grid.t_max;
    json meta;
    meta["descriptor"] = cfg.descriptor.label();
    meta["seed"] = cfg.seed;
    meta["bin_width"] = width;
    meta["n_bins"] = field.n_bins_total;
    meta["weight"] = field.weight;
    meta["residual_one"] = occupation_residual(path, field, TestFn::one(), t_end);
    meta["residual_coordinate"] =
        occupation_residual(path, field, TestFn::coordinate(0), t_end);
    if (cfg.descriptor.d == 1) {
        const CrossCheckResult xc = localtime_cross_check(path, width, 40.0, 5);
        meta["cross_check"] = {{"max_discrepancy", xc.max_discrepancy},
                               {"atomic_suspected", xc.atomic_suspected}};
    }
    write_json(meta, (fs::path(cfg.out_dir) / "localtime.json").string());
    if (!o.quiet)
        std::printf("localtime: %zu bins, width %g, residual(one) = %g\n", field.n_bins_total,
                    width, meta["residual_one"].get<double>());
    return 0;
}

int run_and_emit(ExperimentConfig cfg, const Opts& o, const char* tag) {
    const ReportBundle bundle = run_experiment(cfg);
    const FileManifest manifest = emit_report(bundle, cfg.out_dir);
    if (!o.quiet) {
        std::printf("%s: %d replicate(s), %zu profile rows, %zu verdicts -> %s\n", tag,
                    cfg.n_replicates, bundle.profiles.size(), bundle.verdicts.size(),
                    manifest.directory.c_str());
        for (const auto& [name, stat] : bundle.aggregates)
            if (name.rfind("nu_hat", 0) == 0)
                std::printf("  %s: mean %.4f  se %.4f  range [%.4f, %.4f]\n", name.c_str(),
                            stat.mean, stat.se, stat.min, stat.max);
    }
    return 0;
}

int cmd_besov(const Opts& o) {
    ExperimentConfig cfg = base_config(o);
    cfg.localtime = LocaltimeSettings{};
    cfg.lnd = LndSettings{};
    if (cfg.besov.empty()) {
        BesovQuery q;
        q.nu = cfg.descriptor.alpha();
        q.p = 2.0;
        q.J_max = std::max(2, cfg.grid.levels() - 2);
        cfg.besov.push_back(q);
    }
    return run_and_emit(std::move(cfg), o, "besov");
}

int cmd_experiment(const Opts& o) { return run_and_emit(base_config(o), o, "experiment"); }

int cmd_lnd_check(const Opts& o) {
    ExperimentConfig cfg = base_config(o);
    if (!cfg.lnd.enabled) {
        cfg.lnd.enabled = true;
        cfg.lnd.m = 2;
        cfg.lnd.alpha = cfg.descriptor.alpha();
        cfg.lnd.k.assign(static_cast<std::size_t>(2 * cfg.descriptor.d), 2);
        cfg.lnd.sample.seed = cfg.seed;
        cfg.lnd.n_berman = 1000;
        cfg.validate();
    }
    ensure_dir(cfg.out_dir);
    const json report = lnd_report(cfg);
    write_json(report, (fs::path(cfg.out_dir) / "lnd_report.json").string());
    if (!o.quiet)
        std::printf("lnd-check: c_empirical = %.9g over %llu samples\n",
                    report["c_empirical"].get<double>(),
                    static_cast<unsigned long long>(report["n_samples"].get<std::uint64_t>()));
    return 0;
}

int cmd_grr_check(const Opts& o) {
    ExperimentConfig cfg = base_config(o);
    if (o.cases < 1) throw ValidationError("grr-check: --cases must be >= 1");
    ensure_dir(cfg.out_dir);
    std::mt19937_64 engine(splitmix64(cfg.seed ^ 0x677272ULL));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t n_grid = 257;
    json per_case = json::array();
    std::size_t total_violations = 0;
    double worst = 0.0;
    for (int c = 0; c < o.cases; ++c) {
        // Random piecewise-linear g on [0,1], sampled on the analysis grid.
        const int nb = 5 + static_cast<int>(unif(engine) * 16);
        std::vector<double> knots(static_cast<std::size_t>(nb));
        for (double& k : knots) k = unif(engine);
        std::sort(knots.begin(), knots.end());
        knots.front() = 0.0;
        knots.back() = 1.0;
        std::vector<double> vals(knots.size());
        for (double& v : vals) v = 2.0 * unif(engine) - 1.0;
        std::vector<double> g(n_grid);
        std::size_t seg = 0;
        for (std::size_t i = 0; i < n_grid; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(n_grid - 1);
            while (seg + 2 < knots.size() && knots[seg + 1] <= x) ++seg;
            const double span = knots[seg + 1] - knots[seg];
            const double w = span > 0.0 ? (x - knots[seg]) / span : 0.0;
            g[i] = vals[seg] + w * (vals[seg + 1] - vals[seg]);
        }
        double p = 0.0, nu = 0.0, beta = 0.0;
        for (;;) {
            p = 2.2 + 3.8 * unif(engine);
            nu = 0.05 + 0.9 * unif(engine);
            const double lo = std::max(0.05, 2.0 - nu * p + 0.05);
            const double hi = p * (1.0 - nu) - 0.05;
            if (hi > lo) {
                beta = lo + (hi - lo) * unif(engine);
                break;
            }
        }
        const GrrCase result = grr_check(g, p, nu, beta);
        total_violations += result.violations;
        worst = std::max(worst, result.max_ratio);
        per_case.push_back({{"p", result.p_exp},
                            {"nu", result.nu},
                            {"beta", result.beta},
                            {"B", result.B},
                            {"violations", result.violations},
                            {"max_ratio", result.max_ratio}});
    }
    json report;
    report["cases"] = o.cases;
    report["total_violations"] = total_violations;
    report["max_ratio"] = worst;
    report["slack"] = 1.05;
    report["per_case"] = per_case;
    write_json(report, (fs::path(cfg.out_dir) / "grr_report.json").string());
    if (!o.quiet)
        std::printf("grr-check: %zu violation(s) in %d case(s), max ratio %.4f\n",
                    total_violations, o.cases, worst);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"besovlab: regularity statistics for simulated stochastic processes"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Opts o;
    CLI::App* simulate = app.add_subcommand("simulate", "Sample paths and write them as CSV");
    CLI::App* localtime =
        app.add_subcommand("localtime", "Estimate a local-time field for one replicate");
    localtime->add_option("--bin-width", o.bin_width, "Histogram bin width (default: heuristic)");
    localtime->add_option("--t-stride", o.t_stride, "Subsample the time axis of the CSV");
    CLI::App* besov =
        app.add_subcommand("besov", "Dyadic Besov profiles and regularity verdicts");
    CLI::App* lnd = app.add_subcommand("lnd-check", "Characteristic-function LND diagnostics");
    CLI::App* grr =
        app.add_subcommand("grr-check", "Garsia-Rodemich-Rumsey bound on random test functions");
    grr->add_option("--cases", o.cases, "Number of random functions");
    CLI::App* experiment =
        app.add_subcommand("experiment", "Full replicated experiment with report emission");
    for (CLI::App* sub : {simulate, localtime, besov, lnd, grr, experiment}) add_common(sub, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(o);
        if (localtime->parsed()) return cmd_localtime(o);
        if (besov->parsed()) return cmd_besov(o);
        if (lnd->parsed()) return cmd_lnd_check(o);
        if (grr->parsed()) return cmd_grr_check(o);
        if (experiment->parsed()) return cmd_experiment(o);
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
