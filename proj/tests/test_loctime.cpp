#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "besovlab/local_time.hpp"
#include "besovlab/sampling.hpp"

using namespace besovlab;

namespace {

SamplePath manual_path(const std::vector<double>& times, const std::vector<double>& values) {
    SamplePath p;
    p.times = times;
    p.values = Eigen::Map<const Eigen::MatrixXd>(values.data(),
                                                 static_cast<Eigen::Index>(values.size()), 1);
    p.descriptor.kind = ProcessKind::Bm;
    return p;
}

SamplePath identity_path(std::size_t n) {
    GridSpec grid{n, 1.0};
    std::vector<double> t = grid.times();
    return manual_path(t, t);
}

SamplePath bm_path(std::size_t n, std::uint64_t seed, int d = 1) {
    ProcessDescriptor desc;
    desc.kind = ProcessKind::Bm;
    desc.d = d;
    PathSampler sampler(desc, GridSpec{n, 1.0}, SamplerMode::Circulant);
    return sampler.draw(seed, 0);
}

}  // namespace

TEST_CASE("three-sample histogram example", "[loctime]") {
    // samples 0.1, 0.1, 0.6 at dt = 1/3; bins [0, 0.5) and [0.5, 1):
    // L(., t=1) = (1/3)/(1/2) * (2, 1) = (4/3, 2/3); the value at t = 1
    // itself is never counted (left rule).
    const SamplePath p =
        manual_path({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}, {0.1, 0.1, 0.6, 99.0});
    BinLayout layout;
    layout.origin = {0.0};
    layout.n_bins = {2};
    layout.width = 0.5;
    const LocalTimeField field = local_time_field(p, 0.5, &layout);
    const std::size_t t1 = field.locate_time(1.0);
    REQUIRE(field.value(t1, 0) == Catch::Approx(4.0 / 3.0).epsilon(1e-14));
    REQUIRE(field.value(t1, 1) == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
    // at t = 2/3 only the first two samples count
    const std::size_t t23 = field.locate_time(2.0 / 3.0);
    REQUIRE(field.value(t23, 0) == Catch::Approx(4.0 / 3.0).epsilon(1e-14));
    REQUIRE(field.value(t23, 1) == 0.0);
    REQUIRE_THROWS_AS(field.locate_time(0.4), ValidationError);
}

TEST_CASE("mass conservation is exact", "[loctime]") {
    const SamplePath p = bm_path(4097, 51);
    const LocalTimeField field = local_time_field(p, default_bin_width(p));
    const double dx = field.bins.width;
    for (const double t : {0.25, 0.5, 1.0}) {
        const std::size_t ti = field.locate_time(t);
        double mass = 0.0;
        for (std::size_t b = 0; b < field.n_bins_total; ++b) mass += field.value(ti, b);
        REQUIRE(mass * dx == Catch::Approx(t).margin(1e-9));
    }
}

TEST_CASE("local time is nondecreasing in t", "[loctime]") {
    const SamplePath p = bm_path(1025, 52);
    const LocalTimeField field = local_time_field(p, 0.05);
    for (std::size_t b = 0; b < field.n_bins_total; b += 7)
        for (std::size_t ti = 1; ti < field.n_times(); ti += 97)
            REQUIRE(field.value(ti, b) >= field.value(ti - 1, b));
}

TEST_CASE("identity path local time is flat", "[loctime]") {
    // occupation density of phi(t) = t is 1 on [0,1]
    const SamplePath p = identity_path(4097);
    BinLayout layout;
    layout.origin = {0.0};
    layout.n_bins = {16};
    layout.width = 1.0 / 16.0;
    const LocalTimeField field = local_time_field(p, layout.width, &layout);
    const std::size_t t1 = field.locate_time(1.0);
    for (std::size_t b = 0; b < 16; ++b)
        REQUIRE(field.value(t1, b) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histogram additivity over refinements", "[loctime]") {
    // merging two half-width bins reproduces the coarse count
    const SamplePath p = bm_path(1025, 53);
    BinLayout coarse;
    coarse.origin = {-4.0};
    coarse.n_bins = {16};
    coarse.width = 0.5;
    BinLayout fine = coarse;
    fine.n_bins = {32};
    fine.width = 0.25;
    const LocalTimeField fc = local_time_field(p, coarse.width, &coarse);
    const LocalTimeField ff = local_time_field(p, fine.width, &fine);
    const std::size_t t1 = fc.locate_time(1.0);
    for (std::size_t b = 0; b < 16; ++b) {
        const double merged = 0.5 * (ff.value(t1, 2 * b) + ff.value(t1, 2 * b + 1));
        REQUIRE(fc.value(t1, b) == Catch::Approx(merged).margin(1e-12));
    }
}

TEST_CASE("bin budget is enforced", "[loctime]") {
    const SamplePath p = bm_path(1025, 54, 3);
    REQUIRE_THROWS_AS(local_time_field(p, 1e-4), ResourceError);
}

TEST_CASE("default bin width shrinks with resolution", "[loctime]") {
    const SamplePath a = identity_path(1025);
    const SamplePath b = identity_path(4097);
    REQUIRE(default_bin_width(a) > 0.0);
    REQUIRE(default_bin_width(b) < default_bin_width(a));
    // range 1, d = 1, n = 1025: the n^(-2/3) heuristic
    REQUIRE(default_bin_width(a) == Catch::Approx(std::pow(1025.0, -2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("occupation residual: exact for f = 1, small for smooth f", "[loctime]") {
    const SamplePath p = bm_path(4097, 55);
    const LocalTimeField field = local_time_field(p, default_bin_width(p));
    const double dt = 1.0 / 4096.0;
    const double dx = field.bins.width;
    REQUIRE(occupation_residual(p, field, TestFn::one(), 1.0) <= 1e-9);
    REQUIRE(occupation_residual(p, field, TestFn::one(), 0.5) <= 1e-9);
    REQUIRE(occupation_residual(p, field, TestFn::coordinate(0), 1.0) <= dt + dx);
    REQUIRE(occupation_residual(p, field, TestFn::gaussian_bump(0.0, 1.0), 1.0) <= dt + dx);
}

TEST_CASE("occupation residual vanishes for bin-aligned indicators", "[loctime]") {
    const SamplePath p = bm_path(1025, 56);
    BinLayout layout;
    layout.origin = {-4.0};
    layout.n_bins = {32};
    layout.width = 0.25;
    const LocalTimeField field = local_time_field(p, layout.width, &layout);
    // [a, b) on bin edges: both sides count exactly the same samples
    const TestFn fn = TestFn::indicator(-0.5, 0.75);
    REQUIRE(occupation_residual(p, field, fn, 1.0) <= 1e-12);
}

TEST_CASE("test function battery evaluates", "[loctime]") {
    const double x2[2] = {0.3, -0.2};
    REQUIRE(TestFn::one()(x2, 2) == 1.0);
    REQUIRE(TestFn::coordinate(1)(x2, 2) == -0.2);
    REQUIRE(TestFn::indicator(0.0, 0.5)(x2, 2) == 1.0);
    REQUIRE(TestFn::indicator(0.4, 0.5)(x2, 2) == 0.0);
    // product bump centered at (0.3, 0.3): exp(0) * exp(-0.5^2 / 2)
    REQUIRE(TestFn::gaussian_bump(0.3, 1.0)(x2, 2) == Catch::Approx(std::exp(-0.125)));
}

TEST_CASE("fourier inversion approximates identity-path density", "[loctime]") {
    const SamplePath p = identity_path(1025);
    FourierLtQuery q;
    q.t = 1.0;
    q.x = {0.5};

    q.N = 0.0;
    REQUIRE(fourier_local_time(p, q) == 0.0);

    q.N = 200.0;
    REQUIRE(fourier_local_time(p, q) == Catch::Approx(1.0).margin(0.02));

    // far outside the occupied range the density vanishes
    q.x = {5.0};
    REQUIRE(std::abs(fourier_local_time(p, q)) < 5e-3);

    // truncation error shrinks with N
    q.x = {0.5};
    q.N = 25.0;
    const double coarse = std::abs(fourier_local_time(p, q) - 1.0);
    q.N = 400.0;
    const double fine = std::abs(fourier_local_time(p, q) - 1.0);
    REQUIRE(fine < coarse);
}

TEST_CASE("fourier inversion dimension limits", "[loctime]") {
    const SamplePath p2 = bm_path(1025, 57, 2);
    FourierLtQuery q;
    q.N = 5.0;
    q.t = 1.0;
    q.x = {0.0, 0.0};
    REQUIRE(std::isfinite(fourier_local_time(p2, q)));

    const SamplePath p3 = bm_path(1025, 58, 3);
    q.x = {0.0, 0.0, 0.0};
    REQUIRE_THROWS_AS(fourier_local_time(p3, q), UnsupportedError);
}

TEST_CASE("cross-check probes and agreement", "[loctime]") {
    const SamplePath ident = identity_path(1025);
    const CrossCheckResult r = localtime_cross_check(ident, 1.0 / 32.0, 60.0, 3);
    REQUIRE(r.probes.size() == 3);
    REQUIRE(r.probes[0] == Catch::Approx(0.25));
    REQUIRE(r.probes[1] == Catch::Approx(0.5));
    REQUIRE(r.probes[2] == Catch::Approx(0.75));
    REQUIRE_FALSE(r.atomic_suspected);
    REQUIRE(r.max_discrepancy < 0.25);

    const SamplePath bm = bm_path(4097, 59);
    const CrossCheckResult rb = localtime_cross_check(bm, default_bin_width(bm), 40.0, 5);
    REQUIRE_FALSE(rb.atomic_suspected);
    REQUIRE(rb.max_discrepancy < 1.0);

    // constant path: occupation measure is a point mass; flagged, not an error
    std::vector<double> t = GridSpec{1025, 1.0}.times();
    const SamplePath flat = manual_path(t, std::vector<double>(1025, 0.3));
    const CrossCheckResult rf = localtime_cross_check(flat, 0.1, 20.0, 3);
    REQUIRE(rf.atomic_suspected);

    const SamplePath p2 = bm_path(1025, 60, 2);
    REQUIRE_THROWS_AS(localtime_cross_check(p2, 0.1, 10.0, 3), ValidationError);
}
