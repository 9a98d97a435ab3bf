#include "besovlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "besovlab/local_time.hpp"
#include "besovlab/report.hpp"
#include "besovlab/rng.hpp"
#include "besovlab/she.hpp"
#include "besovlab/stats.hpp"
#include "besovlab/version.hpp"

namespace besovlab {

namespace {

using nlohmann::json;

std::string fmt_g(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

[[noreturn]] void unknown_key(const std::string& where, const std::string& key) {
    throw ValidationError("config: unknown key \"" + key + "\" in " + where);
}

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            unknown_key(where, key);
    }
}

double number_at(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number())
        throw ValidationError(std::string("config: field \"") + key + "\" must be a number");
    return obj.at(key).get<double>();
}

std::int64_t int_at(const json& obj, const char* key, std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number_integer())
        throw ValidationError(std::string("config: field \"") + key + "\" must be an integer");
    return obj.at(key).get<std::int64_t>();
}

std::string string_at(const json& obj, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string())
        throw ValidationError(std::string("config: field \"") + key + "\" must be a string");
    return obj.at(key).get<std::string>();
}

SamplerMode sampler_from_string(const std::string& s) {
    if (s == "auto") return SamplerMode::Auto;
    if (s == "exact") return SamplerMode::Exact;
    if (s == "circulant") return SamplerMode::Circulant;
    throw ValidationError("config: sampler must be auto|exact|circulant, got \"" + s + "\"");
}

std::string sampler_to_string(SamplerMode mode) {
    switch (mode) {
        case SamplerMode::Auto: return "auto";
        case SamplerMode::Exact: return "exact";
        case SamplerMode::Circulant: return "circulant";
    }
    return "auto";
}

void parse_process(const json& obj, ProcessDescriptor& desc) {
    expect_keys(obj, "process", {"kind", "d", "H", "K", "she"});
    if (!obj.contains("kind"))
        throw ValidationError("config: missing field \"kind\" in process");
    desc.kind = process_kind_from_string(string_at(obj, "kind", ""));
    desc.d = static_cast<int>(int_at(obj, "d", desc.d));
    desc.H = number_at(obj, "H", desc.H);
    desc.K = number_at(obj, "K", desc.K);
    if (obj.contains("she")) {
        const json& s = obj.at("she");
        if (!s.is_object()) throw ValidationError("config: \"she\" must be an object");
        expect_keys(s, "process.she", {"sigma", "rho", "b", "nx", "x_probe"});
        desc.she.sigma = sigma_kind_from_string(string_at(s, "sigma", "identity"));
        desc.she.rho = number_at(s, "rho", desc.she.rho);
        desc.she.b = drift_kind_from_string(string_at(s, "b", "zero"));
        desc.she.nx = static_cast<int>(int_at(s, "nx", desc.she.nx));
        desc.she.x_probe = number_at(s, "x_probe", desc.she.x_probe);
    }
}

BesovQuery parse_besov_query(const json& obj, double default_nu, int default_J) {
    if (!obj.is_object()) throw ValidationError("config: besov entries must be objects");
    expect_keys(obj, "besov[]", {"nu", "p", "q", "J_max"});
    BesovQuery q;
    q.nu = number_at(obj, "nu", default_nu);
    q.p = number_at(obj, "p", 2.0);
    if (obj.contains("q") && !obj.at("q").is_null()) q.q = number_at(obj, "q", 2.0);
    q.J_max = static_cast<int>(int_at(obj, "J_max", default_J));
    return q;
}

}  // namespace

void ExperimentConfig::validate() const {
    descriptor.validate();
    grid.validate();
    if (n_replicates < 1) throw ValidationError("config: n_replicates must be >= 1");
    if (!(tau > 0.0)) throw ValidationError("config: tau must be positive");
    for (const BesovQuery& q : besov) q.validate(grid.n_points);
    if (localtime.enabled) {
        const double ad = descriptor.alpha() * descriptor.d;
        if (!(ad < 1.0))
            throw ValidationError(
                "config: local-time regularity requires alpha * d < 1, got alpha * d = " +
                fmt_g(ad) + " for " + descriptor.label());
        if (localtime.bin_width < 0.0)
            throw ValidationError("config: localtime.bin_width must be >= 0");
        if (!(localtime.q >= 1.0)) throw ValidationError("config: localtime.q must be >= 1");
        if (localtime.nus.empty()) throw ValidationError("config: localtime.nus must be non-empty");
        for (double nu : localtime.nus)
            if (!(nu > 0.0 && nu < 1.0))
                throw ValidationError("config: localtime nu values must lie in (0,1)");
        const int J = grid.levels();
        if (localtime.J_max < 2 || (std::size_t{1} << localtime.J_max) > (grid.n_points - 1) / 4)
            throw ValidationError("config: localtime.J_max out of range for grid with J = " +
                                  std::to_string(J));
    }
    if (lnd.enabled) {
        if (lnd.m < 2) throw ValidationError("config: lnd.m must be >= 2");
        if (!lnd.k.empty() && lnd.k.size() != static_cast<std::size_t>(lnd.m * descriptor.d))
            throw ValidationError("config: lnd.k must have m * d entries");
        if (!(lnd.alpha > 0.0 && lnd.alpha < 1.0))
            throw ValidationError("config: lnd.alpha must lie in (0,1)");
    }
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config: top-level JSON value must be an object");
    ExperimentConfig cfg;

    const bool flat = j.contains("kind");
    json process, root = j;
    if (flat) {
        expect_keys(j, "config",
                    {"kind", "d", "H", "K", "she", "n_points", "t_max", "seed", "n_replicates",
                     "sampler", "tau", "besov", "localtime", "lnd", "out_dir"});
        process = json::object();
        for (const char* key : {"kind", "d", "H", "K", "she"})
            if (j.contains(key)) process[key] = j.at(key);
        root = json::object();
        for (const auto& [key, value] : j.items())
            if (key != "kind" && key != "d" && key != "H" && key != "K" && key != "she")
                root[key] = value;
        root["grid"] = json::object();
        if (root.contains("n_points")) {
            root["grid"]["n_points"] = root.at("n_points");
            root.erase("n_points");
        }
        if (root.contains("t_max")) {
            root["grid"]["t_max"] = root.at("t_max");
            root.erase("t_max");
        }
    } else {
        expect_keys(j, "config",
                    {"process", "grid", "seed", "n_replicates", "sampler", "tau", "besov",
                     "localtime", "lnd", "out_dir"});
        if (!j.contains("process"))
            throw ValidationError("config: missing field \"process\"");
        process = j.at("process");
        if (!process.is_object()) throw ValidationError("config: \"process\" must be an object");
    }

    parse_process(process, cfg.descriptor);

    if (root.contains("grid")) {
        const json& g = root.at("grid");
        if (!g.is_object()) throw ValidationError("config: \"grid\" must be an object");
        expect_keys(g, "grid", {"n_points", "t_max"});
        cfg.grid.n_points = static_cast<std::size_t>(int_at(g, "n_points", 1025));
        cfg.grid.t_max = number_at(g, "t_max", 1.0);
    }
    cfg.seed = static_cast<std::uint64_t>(int_at(root, "seed", 0));
    cfg.n_replicates = static_cast<int>(int_at(root, "n_replicates", 1));
    cfg.sampler = sampler_from_string(string_at(root, "sampler", "auto"));
    cfg.tau = number_at(root, "tau", 0.1);
    cfg.out_dir = string_at(root, "out_dir", "out");

    cfg.descriptor.validate();
    cfg.grid.validate();
    const int default_J = std::max(2, cfg.grid.levels() - 2);
    const double alpha = cfg.descriptor.alpha();

    if (root.contains("besov")) {
        const json& b = root.at("besov");
        if (!b.is_array()) throw ValidationError("config: \"besov\" must be an array");
        for (const json& entry : b) cfg.besov.push_back(parse_besov_query(entry, alpha, default_J));
    }

    if (root.contains("localtime")) {
        const json& lt = root.at("localtime");
        if (!lt.is_object()) throw ValidationError("config: \"localtime\" must be an object");
        expect_keys(lt, "localtime", {"bin_width", "q", "nus", "J_max"});
        cfg.localtime.enabled = true;
        cfg.localtime.bin_width = number_at(lt, "bin_width", 0.0);
        cfg.localtime.q = number_at(lt, "q", 1.0);
        cfg.localtime.J_max = static_cast<int>(int_at(lt, "J_max", default_J));
        if (lt.contains("nus")) {
            if (!lt.at("nus").is_array())
                throw ValidationError("config: localtime.nus must be an array");
            for (const json& v : lt.at("nus")) {
                if (!v.is_number())
                    throw ValidationError("config: localtime.nus entries must be numbers");
                cfg.localtime.nus.push_back(v.get<double>());
            }
        }
        if (cfg.localtime.nus.empty()) cfg.localtime.nus.push_back(alpha);
    }

    if (root.contains("lnd")) {
        const json& ln = root.at("lnd");
        if (!ln.is_object()) throw ValidationError("config: \"lnd\" must be an object");
        expect_keys(ln, "lnd",
                    {"m", "k", "alpha", "refine_level", "time_level", "window", "mag_lo", "mag_hi",
                     "n_random", "n_berman"});
        cfg.lnd.enabled = true;
        cfg.lnd.m = static_cast<int>(int_at(ln, "m", 2));
        cfg.lnd.alpha = number_at(ln, "alpha", alpha);
        cfg.lnd.sample.refine_level = static_cast<int>(int_at(ln, "refine_level", 8));
        cfg.lnd.sample.time_level = static_cast<int>(int_at(ln, "time_level", 4));
        cfg.lnd.sample.window = number_at(ln, "window", 0.5);
        cfg.lnd.sample.mag_lo = number_at(ln, "mag_lo", 1e-2);
        cfg.lnd.sample.mag_hi = number_at(ln, "mag_hi", 1e3);
        cfg.lnd.sample.n_random = static_cast<std::size_t>(int_at(ln, "n_random", 0));
        cfg.lnd.sample.seed = cfg.seed;
        cfg.lnd.n_berman = static_cast<std::size_t>(int_at(ln, "n_berman", 0));
        if (ln.contains("k")) {
            if (!ln.at("k").is_array()) throw ValidationError("config: lnd.k must be an array");
            for (const json& row : ln.at("k")) {
                if (row.is_number_integer()) {
                    cfg.lnd.k.push_back(row.get<int>());
                } else if (row.is_array()) {
                    for (const json& e : row) {
                        if (!e.is_number_integer())
                            throw ValidationError("config: lnd.k entries must be integers");
                        cfg.lnd.k.push_back(e.get<int>());
                    }
                } else {
                    throw ValidationError("config: lnd.k entries must be integers");
                }
            }
        }
        if (cfg.lnd.k.empty())
            cfg.lnd.k.assign(static_cast<std::size_t>(cfg.lnd.m * cfg.descriptor.d), 2);
    }

    if (cfg.besov.empty() && !cfg.localtime.enabled && !cfg.lnd.enabled) {
        BesovQuery q;
        q.nu = alpha;
        q.p = 2.0;
        q.J_max = default_J;
        cfg.besov.push_back(q);
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("config: " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

json canonical_json(const ExperimentConfig& config) {
    json j;
    json p;
    p["kind"] = to_string(config.descriptor.kind);
    p["d"] = config.descriptor.d;
    p["H"] = config.descriptor.H;
    p["K"] = config.descriptor.K;
    if (config.descriptor.kind == ProcessKind::She) {
        json s;
        s["sigma"] = to_string(config.descriptor.she.sigma);
        s["rho"] = config.descriptor.she.rho;
        s["b"] = to_string(config.descriptor.she.b);
        s["nx"] = config.descriptor.she.nx;
        s["x_probe"] = config.descriptor.she.x_probe;
        p["she"] = s;
    }
    j["process"] = p;
    j["grid"] = {{"n_points", config.grid.n_points}, {"t_max", config.grid.t_max}};
    j["seed"] = config.seed;
    j["n_replicates"] = config.n_replicates;
    j["sampler"] = sampler_to_string(config.sampler);
    j["tau"] = config.tau;
    json queries = json::array();
    for (const BesovQuery& q : config.besov) {
        json e;
        e["nu"] = q.nu;
        e["p"] = q.p;
        e["q"] = q.q ? json(*q.q) : json(nullptr);
        e["J_max"] = q.J_max;
        queries.push_back(e);
    }
    j["besov"] = queries;
    if (config.localtime.enabled) {
        j["localtime"] = {{"bin_width", config.localtime.bin_width},
                          {"q", config.localtime.q},
                          {"nus", config.localtime.nus},
                          {"J_max", config.localtime.J_max}};
    }
    if (config.lnd.enabled) {
        j["lnd"] = {{"m", config.lnd.m},
                    {"k", config.lnd.k},
                    {"alpha", config.lnd.alpha},
                    {"refine_level", config.lnd.sample.refine_level},
                    {"time_level", config.lnd.sample.time_level},
                    {"window", config.lnd.sample.window},
                    {"mag_lo", config.lnd.sample.mag_lo},
                    {"mag_hi", config.lnd.sample.mag_hi},
                    {"n_random", config.lnd.sample.n_random},
                    {"n_berman", config.lnd.n_berman}};
    }
    return j;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    return fnv1a64(canonical_json(config).dump());
}

AggregateStat aggregate_stat(const std::vector<double>& xs) {
    AggregateStat s;
    s.n = static_cast<int>(xs.size());
    if (xs.empty()) return s;
    s.mean = mean(xs);
    s.se = standard_error(xs);
    s.min = *std::min_element(xs.begin(), xs.end());
    s.max = *std::max_element(xs.begin(), xs.end());
    return s;
}

unsigned resolve_threads() {
    if (const char* env = std::getenv("BESOVLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw ValidationError("BESOVLAB_THREADS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

namespace {

struct PathGroup {
    double p = 2.0;
    int J_max = 2;
    std::string id;
    std::vector<std::size_t> query_index;  // indices into config.besov
};

std::vector<PathGroup> path_groups(const ExperimentConfig& cfg) {
    std::vector<PathGroup> groups;
    for (std::size_t qi = 0; qi < cfg.besov.size(); ++qi) {
        const BesovQuery& q = cfg.besov[qi];
        auto it = std::find_if(groups.begin(), groups.end(), [&](const PathGroup& g) {
            return g.p == q.p && g.J_max == q.J_max;
        });
        if (it == groups.end()) {
            groups.push_back({q.p, q.J_max, "path_p" + fmt_g(q.p), {qi}});
        } else {
            it->query_index.push_back(qi);
        }
    }
    // Same p at two different J_max values needs disambiguation.
    for (auto& g : groups) {
        const bool clash = std::count_if(groups.begin(), groups.end(), [&](const PathGroup& o) {
                               return o.p == g.p;
                           }) > 1;
        if (clash) g.id += "_J" + std::to_string(g.J_max);
    }
    return groups;
}

}  // namespace

json lnd_report(const ExperimentConfig& cfg) {
    const LndSettings& settings = cfg.lnd;
    const ProcessDescriptor& desc = cfg.descriptor;
    Eigen::MatrixXi k(settings.m, desc.d);
    for (int j = 0; j < settings.m; ++j)
        for (int l = 0; l < desc.d; ++l) k(j, l) = settings.k[j * desc.d + l];
    const LndReport rep = alphalnd_constant(desc, settings.m, k, settings.alpha, settings.sample);
    json out;
    out["alpha"] = settings.alpha;
    out["m"] = settings.m;
    out["k"] = settings.k;
    out["c_empirical"] = rep.c_empirical;
    out["n_samples"] = rep.n_samples;
    out["argmax_times"] = rep.argmax_times;
    std::vector<double> vflat(rep.argmax_v.data(), rep.argmax_v.data() + rep.argmax_v.size());
    out["argmax_v"] = vflat;
    out["window"] = rep.window;
    if (settings.n_berman > 0 && desc.d == 1) {
        std::mt19937_64 engine(splitmix64(cfg.seed ^ 0xbe77a9ULL));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < settings.n_berman; ++i) {
            std::vector<double> times(static_cast<std::size_t>(settings.m));
            for (double& t : times) t = 0.05 + 0.95 * unif(engine);
            std::sort(times.begin(), times.end());
            bool distinct = true;
            for (std::size_t u = 1; u < times.size(); ++u)
                distinct = distinct && times[u] > times[u - 1] + 1e-12;
            if (!distinct) {
                --i;
                continue;
            }
            std::vector<double> v(times.size());
            for (double& x : v) x = 2.0 * unif(engine) - 1.0;
            bool nonzero = false;
            for (double x : v) nonzero = nonzero || x != 0.0;
            if (!nonzero) v[0] = 1.0;
            const double r = berman_lnd_ratio(desc, times, v);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        out["berman_ratio_min"] = lo;
        out["berman_ratio_max"] = hi;
        out["n_berman"] = settings.n_berman;
    }
    {
        // Ratio Var(X_t - X_s) / |t-s|^(2 alpha) over a dyadic pair grid.
        std::vector<std::pair<double, double>> pairs;
        const int n = 64;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j <= n; ++j)
                pairs.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
        const auto [lo, hi] = variance_bounds_check(desc, settings.alpha, pairs);
        out["variance_ratio_min"] = lo;
        out["variance_ratio_max"] = hi;
    }
    return out;
}

ReportBundle run_experiment(const ExperimentConfig& config) {
    config.validate();
    ReportBundle bundle;
    bundle.config = config;
    bundle.hash = config_hash(config);
    bundle.version = kVersion;
    bundle.lnd = nullptr;

    const int R = config.n_replicates;
    const std::vector<PathGroup> groups = path_groups(config);
    const std::string lt_id = "lt_q" + fmt_g(config.localtime.q);
    const double lt_bin_width = config.localtime.bin_width;  // 0 -> per-path heuristic

    const bool she = config.descriptor.kind == ProcessKind::She;
    std::unique_ptr<PathSampler> sampler;
    if (!she) sampler = std::make_unique<PathSampler>(config.descriptor, config.grid, config.sampler);

    std::vector<std::vector<ProfileRecord>> profiles_by_rep(R);
    std::vector<std::vector<VerdictRecord>> verdicts_by_rep(R);
    std::vector<char> fallback_by_rep(R, 0);
    std::vector<std::pair<int, std::exception_ptr>> failures;
    std::mutex failure_mutex;
    std::atomic<int> next{0};

    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= R) return;
            try {
                SamplePath path = she ? solve_she(config.descriptor, config.grid, config.seed,
                                                 static_cast<std::uint64_t>(r))
                                      : sampler->draw(config.seed, static_cast<std::uint64_t>(r));
                fallback_by_rep[r] = path.covariance_fallback ? 1 : 0;
                for (const PathGroup& g : groups) {
                    DyadicProfile prof = dyadic_profile(path.values, g.p, g.J_max);
                    ProfileRecord rec;
                    rec.statistic = g.id;
                    rec.replicate = r;
                    rec.A = prof.A;
                    profiles_by_rep[r].push_back(std::move(rec));
                    for (std::size_t qi : g.query_index) {
                        const BesovQuery& q = config.besov[qi];
                        VerdictRecord v;
                        v.statistic = g.id;
                        v.replicate = r;
                        v.nu = q.nu;
                        v.verdict = classify_regularity(prof, q.nu, config.tau);
                        verdicts_by_rep[r].push_back(std::move(v));
                    }
                }
                if (config.localtime.enabled) {
                    const double width =
                        lt_bin_width > 0.0 ? lt_bin_width : default_bin_width(path);
                    LocalTimeField field = local_time_field(path, width);
                    DyadicProfile prof;
                    for (std::size_t ni = 0; ni < config.localtime.nus.size(); ++ni) {
                        DyadicProfile p_nu = uniform_localtime_statistic(
                            field, config.localtime.q, config.localtime.nus[ni],
                            config.localtime.J_max);
                        if (ni == 0) prof = p_nu;
                        VerdictRecord v;
                        v.statistic = lt_id;
                        v.replicate = r;
                        v.nu = config.localtime.nus[ni];
                        v.verdict = classify_regularity(p_nu, config.localtime.nus[ni], config.tau);
                        verdicts_by_rep[r].push_back(std::move(v));
                    }
                    ProfileRecord rec;
                    rec.statistic = lt_id;
                    rec.replicate = r;
                    rec.A = prof.A;
                    rec.S = prof.S;  // S corresponds to the first configured nu
                    profiles_by_rep[r].push_back(std::move(rec));
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failures.emplace_back(r, std::current_exception());
            }
        }
    };

    const unsigned n_threads = std::min<unsigned>(resolve_threads(), static_cast<unsigned>(R));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    if (!failures.empty()) {
        std::sort(failures.begin(), failures.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        const auto& [rep, ep] = failures.front();
        const std::string tag = "replicate " + std::to_string(rep) + ": ";
        try {
            std::rethrow_exception(ep);
        } catch (const NumericalError& e) {
            throw NumericalError(tag + e.what());
        } catch (const ResourceError& e) {
            throw ResourceError(tag + e.what());
        } catch (const UnsupportedError& e) {
            throw UnsupportedError(tag + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(tag + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error(tag + e.what());
        }
    }

    for (int r = 0; r < R; ++r) {
        for (auto& rec : profiles_by_rep[r]) bundle.profiles.push_back(std::move(rec));
        for (auto& rec : verdicts_by_rep[r]) bundle.verdicts.push_back(std::move(rec));
        bundle.covariance_fallback_count += fallback_by_rep[r];
    }

    // Aggregates: exponent estimate per statistic; slope and verdict fractions per (statistic, nu).
    std::vector<std::string> stat_ids;
    for (const PathGroup& g : groups) stat_ids.push_back(g.id);
    if (config.localtime.enabled) stat_ids.push_back(lt_id);
    for (const std::string& id : stat_ids) {
        std::vector<double> nu_hats;
        for (const ProfileRecord& rec : bundle.profiles) {
            if (rec.statistic != id) continue;
            DyadicProfile prof;
            prof.A = rec.A;
            if (rec.S.empty()) {
                prof.variant = ProfileVariant::Path;
                prof.p = 2.0;
            } else {
                prof.variant = ProfileVariant::LocaltimeUniform;
                prof.q = config.localtime.q;
            }
            nu_hats.push_back(estimate_exponent(prof));
        }
        bundle.aggregates.emplace_back("nu_hat[" + id + "]", aggregate_stat(nu_hats));
    }
    std::vector<std::pair<std::string, double>> seen;  // (id, nu) pairs in first-seen order
    for (const VerdictRecord& v : bundle.verdicts) {
        if (std::find(seen.begin(), seen.end(), std::make_pair(v.statistic, v.nu)) != seen.end())
            continue;
        seen.emplace_back(v.statistic, v.nu);
        std::vector<double> slopes, bounded, blowup;
        for (const VerdictRecord& w : bundle.verdicts) {
            if (w.statistic != v.statistic || w.nu != v.nu) continue;
            slopes.push_back(w.verdict.slope);
            bounded.push_back(w.verdict.bounded ? 1.0 : 0.0);
            blowup.push_back(w.verdict.blows_up ? 1.0 : 0.0);
        }
        const std::string key = v.statistic + ",nu=" + fmt_g(v.nu);
        bundle.aggregates.emplace_back("slope[" + key + "]", aggregate_stat(slopes));
        bundle.aggregates.emplace_back("bounded_fraction[" + key + "]", aggregate_stat(bounded));
        bundle.aggregates.emplace_back("blowup_fraction[" + key + "]", aggregate_stat(blowup));
    }

    if (config.lnd.enabled) bundle.lnd = lnd_report(config);
    return bundle;
}

}  // namespace besovlab
