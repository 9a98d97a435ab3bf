#pragma once

#include <cstdint>
#include <vector>

#include "besovlab/sampling.hpp"

namespace besovlab {

struct BinLayout {
    std::vector<double> origin;  // per-dim lower edge of bin 0
    std::vector<int> n_bins;     // per-dim
    double width = 0.0;          // shared by all dims

    int d() const { return static_cast<int>(n_bins.size()); }
    std::size_t total() const {
        std::size_t t = 1;
        for (int nb : n_bins) t *= static_cast<std::size_t>(nb);
        return t;
    }
};

// Occupation-density histogram on a bin lattice x the full path time grid.
// Counts are cumulative with the left-endpoint rule, so the density at
// (bin, t_i) is weight * counts and mass conservation
// dx^d * sum_bins value = t holds by construction.
struct LocalTimeField {
    ProcessDescriptor descriptor;
    BinLayout bins;
    std::vector<double> t_grid;
    double dt = 0.0;
    double weight = 0.0;  // dt / dx^d
    std::size_t n_bins_total = 0;
    std::vector<std::uint32_t> counts;  // [time][flat bin], cumulative in time

    std::size_t n_times() const { return t_grid.size(); }
    const std::uint32_t* slice(std::size_t ti) const { return counts.data() + ti * n_bins_total; }
    double value(std::size_t ti, std::size_t bin) const {
        return weight * static_cast<double>(counts[ti * n_bins_total + bin]);
    }
    std::vector<double> bin_center(std::size_t flat) const;
    std::size_t locate_time(double t) const;  // index of t on t_grid, or throws
};

// range * n^(-2/(d+2)); see the bin-width note in the README.  A unit box is
// assumed when the path has zero range.
double default_bin_width(const SamplePath& path);

// Histogram occupation-density estimator.  An explicit layout overrides the
// automatic range +- one-bin margin (used by the additivity property test).
LocalTimeField local_time_field(const SamplePath& path, double bin_width,
                                const BinLayout* layout = nullptr);

struct TestFn {
    enum class Kind { One, Coordinate, Indicator, GaussianBump };
    Kind kind = Kind::One;
    int axis = 0;        // Coordinate / Indicator
    double a = 0.0;      // Indicator [a, b)
    double b = 1.0;
    double center = 0.0;  // GaussianBump
    double width = 1.0;

    static TestFn one() { return TestFn{}; }
    static TestFn coordinate(int axis = 0);
    static TestFn indicator(double a, double b, int axis = 0);
    static TestFn gaussian_bump(double center = 0.0, double width = 1.0);

    double operator()(const double* x, int d) const;
};

// | sum_i dt f(phi(t_i)) - dx^d sum_bins f(center) L(bin, t) |, both sides on
// the left-endpoint rule.
double occupation_residual(const SamplePath& path, const LocalTimeField& field,
                           const TestFn& fn, double t);

struct FourierLtQuery {
    double N = 0.0;          // frequency box [-N, N]^d
    std::vector<double> x;   // evaluation point
    double t = 0.0;
};

// Truncated Fourier inversion of the occupation measure: nested trapezoid
// quadrature, time integral on the path grid, frequency step small enough for
// the fastest oscillation |phi - x|.  d <= 2.
double fourier_local_time(const SamplePath& path, const FourierLtQuery& query);

struct CrossCheckResult {
    double max_discrepancy = 0.0;
    bool atomic_suspected = false;  // one bin holds most of the mass
    std::vector<double> probes;
};

// Histogram vs Fourier estimate at evenly spaced interior probes, t = t_max.
CrossCheckResult localtime_cross_check(const SamplePath& path, double bin_width, double N,
                                       int n_probe);

}  // namespace besovlab
