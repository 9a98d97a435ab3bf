#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "besovlab/besov.hpp"
#include "besovlab/grid.hpp"
#include "besovlab/lnd.hpp"
#include "besovlab/process.hpp"
#include "besovlab/sampling.hpp"

namespace besovlab {

struct LocaltimeSettings {
    bool enabled = false;
    double bin_width = 0.0;  // 0 -> default_bin_width heuristic
    double q = 1.0;
    std::vector<double> nus;  // empty -> {descriptor.alpha()}
    int J_max = 0;            // 0 -> grid levels - 2
};

struct LndSettings {
    bool enabled = false;
    int m = 2;
    std::vector<int> k;  // row-major m x d; empty -> all 2
    double alpha = 0.0;  // 0 -> descriptor.alpha()
    LndSampleSpec sample;
    std::size_t n_berman = 0;  // random Berman ratio queries
};

struct ExperimentConfig {
    ProcessDescriptor descriptor;
    GridSpec grid;
    int n_replicates = 1;
    std::uint64_t seed = 0;
    SamplerMode sampler = SamplerMode::Auto;
    double tau = 0.1;
    std::vector<BesovQuery> besov;  // empty -> one default query
    LocaltimeSettings localtime;
    LndSettings lnd;
    std::string out_dir = "out";

    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// Canonical form: defaults materialized, keys sorted, out_dir excluded.
nlohmann::json canonical_json(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

struct ProfileRecord {
    std::string statistic;  // e.g. "path_p4", "lt_q1"
    int replicate = 0;
    std::vector<double> A;
    std::vector<double> S;  // empty for path profiles
};

struct VerdictRecord {
    std::string statistic;
    int replicate = 0;
    double nu = 0.0;
    RegularityVerdict verdict;
};

struct AggregateStat {
    double mean = 0.0;
    double se = 0.0;
    double min = 0.0;
    double max = 0.0;
    int n = 0;
};

AggregateStat aggregate_stat(const std::vector<double>& xs);

struct ReportBundle {
    ExperimentConfig config;
    std::uint64_t hash = 0;
    std::string version;
    std::vector<ProfileRecord> profiles;
    std::vector<VerdictRecord> verdicts;
    std::vector<std::pair<std::string, AggregateStat>> aggregates;
    nlohmann::json lnd;  // null unless lnd settings enabled
    int covariance_fallback_count = 0;
};

ReportBundle run_experiment(const ExperimentConfig& config);

// Deterministic (path-free) LND diagnostics: empirical alpha-LND constant,
// optional random Berman-ratio sweep, and increment-variance ratio bounds.
nlohmann::json lnd_report(const ExperimentConfig& config);

// Thread cap: BESOVLAB_THREADS if set (>=1), else hardware concurrency.
unsigned resolve_threads();

}  // namespace besovlab
