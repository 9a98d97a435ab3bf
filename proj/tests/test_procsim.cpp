#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "besovlab/moments.hpp"
#include "besovlab/process.hpp"
#include "besovlab/sampling.hpp"
#include "besovlab/she.hpp"

using namespace besovlab;

namespace {

ProcessDescriptor make(ProcessKind kind, double H = 0.5, double K = 1.0, int d = 1) {
    ProcessDescriptor desc;
    desc.kind = kind;
    desc.H = H;
    desc.K = K;
    desc.d = d;
    return desc;
}

}  // namespace

TEST_CASE("bifbm covariance closed form", "[procsim][cov]") {
    // mpmath reference: 2^-1 ((1 + 0.25^1.5)^1 - 0.75^1.5) at H=0.75, K=1
    REQUIRE(cov_bifbm(0.75, 1.0, 0.25, 1.0) ==
            Catch::Approx(0.2377404735808355).epsilon(1e-14));
    // K=1 with H=1/2 is Brownian motion: cov = min(s,t)
    REQUIRE(cov_bifbm(0.5, 1.0, 0.3, 0.7) == Catch::Approx(0.3).margin(1e-15));
    REQUIRE(cov_bifbm(0.6, 0.5, 0.0, 1.0) == 0.0);
    // symmetry and positive variance
    REQUIRE(cov_bifbm(0.6, 0.5, 0.2, 0.9) == Catch::Approx(cov_bifbm(0.6, 0.5, 0.9, 0.2)));
    REQUIRE(cov_bifbm(0.6, 0.5, 1.0, 1.0) > 0.0);
    REQUIRE_THROWS_AS(cov_bifbm(1.2, 1.0, 0.1, 0.2), ValidationError);
    REQUIRE_THROWS_AS(cov_bifbm(0.5, 1.5, 0.1, 0.2), ValidationError);
    REQUIRE_THROWS_AS(cov_bifbm(0.5, 1.0, -0.1, 0.2), ValidationError);
}

TEST_CASE("descriptor validation and alpha", "[procsim]") {
    REQUIRE(make(ProcessKind::Bm).alpha() == 0.5);
    REQUIRE(make(ProcessKind::Fbm, 0.3).alpha() == 0.3);
    REQUIRE(make(ProcessKind::BifBm, 0.6, 0.5).alpha() == Catch::Approx(0.3));
    REQUIRE(make(ProcessKind::She).alpha() == 0.25);

    REQUIRE_THROWS_AS(make(ProcessKind::Fbm, 1.0).validate(), ValidationError);
    REQUIRE_THROWS_AS(make(ProcessKind::BifBm, 0.5, 0.0).validate(), ValidationError);
    REQUIRE_THROWS_AS(make(ProcessKind::Bm, 0.5, 1.0, 0).validate(), ValidationError);
    REQUIRE_THROWS_AS(make(ProcessKind::Bm, 0.5, 1.0, 4).validate(), ValidationError);

    ProcessDescriptor she = make(ProcessKind::She);
    she.she.nx = 8;
    REQUIRE_THROWS_AS(she.validate(), ValidationError);
    she.she.nx = 64;
    she.she.x_probe = 0.0;
    REQUIRE_THROWS_AS(she.validate(), ValidationError);
    she.she.x_probe = 0.5;
    REQUIRE_NOTHROW(she.validate());
}

TEST_CASE("kind string round trips", "[procsim]") {
    for (ProcessKind k : {ProcessKind::Bm, ProcessKind::Fbm, ProcessKind::BifBm, ProcessKind::She})
        REQUIRE(process_kind_from_string(to_string(k)) == k);
    REQUIRE(process_kind_from_string("bm") == ProcessKind::Bm);
    REQUIRE_THROWS_AS(process_kind_from_string("Weird"), ValidationError);
    REQUIRE_THROWS_AS(sigma_kind_from_string("nope"), ValidationError);
}

TEST_CASE("grid validation", "[procsim][grid]") {
    GridSpec g{1025, 1.0};
    REQUIRE(g.levels() == 10);
    REQUIRE_NOTHROW(g.validate());
    REQUIRE(g.times().size() == 1025);
    REQUIRE(g.times().front() == 0.0);
    REQUIRE(g.times().back() == 1.0);
    REQUIRE(g.spacing() == Catch::Approx(1.0 / 1024.0));

    REQUIRE_THROWS_AS((GridSpec{1000, 1.0}).validate(), ValidationError);
    REQUIRE_THROWS_AS((GridSpec{5, 1.0}).validate(), ValidationError);  // J = 2 < 3
    REQUIRE_THROWS_AS((GridSpec{1025, 0.0}).validate(), ValidationError);
}

TEST_CASE("exact sampler is deterministic and replicate-independent", "[procsim][sampling]") {
    const GridSpec grid{129, 1.0};
    PathSampler sampler(make(ProcessKind::Fbm, 0.7), grid, SamplerMode::Exact);
    const SamplePath a = sampler.draw(42, 3);
    const SamplePath b = sampler.draw(42, 3);
    REQUIRE(a.values == b.values);
    REQUIRE(a.values(0, 0) == 0.0);

    // Drawing other replicates first must not change replicate 3.
    PathSampler other(make(ProcessKind::Fbm, 0.7), grid, SamplerMode::Exact);
    (void)other.draw(42, 0);
    (void)other.draw(42, 1);
    REQUIRE(other.draw(42, 3).values == a.values);

    REQUIRE(sampler.draw(42, 4).values != a.values);
    REQUIRE(sampler.draw(43, 3).values != a.values);
}

TEST_CASE("exact sampler marginal variance matches covariance", "[procsim][sampling][mc]") {
    const GridSpec grid{257, 1.0};
    const ProcessDescriptor desc = make(ProcessKind::Fbm, 0.7);
    PathSampler sampler(desc, grid, SamplerMode::Exact);
    const std::size_t R = 4000;
    double sq_end = 0.0, sq_mid = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
        const SamplePath p = sampler.draw(7, r);
        sq_end += p.values(256, 0) * p.values(256, 0);
        sq_mid += p.values(128, 0) * p.values(128, 0);
    }
    sq_end /= R;
    sq_mid /= R;
    // Var X_1 = 1, Var X_0.5 = 0.5^1.4; spread of a variance estimate is
    // Var * sqrt(2/R) ~ 2.2%, so 8% is > 3 standard errors.
    REQUIRE(sq_end == Catch::Approx(1.0).epsilon(0.08));
    REQUIRE(sq_mid == Catch::Approx(std::pow(0.5, 1.4)).epsilon(0.08));
}

TEST_CASE("circulant sampler at H=1/2 gives iid increments", "[procsim][sampling]") {
    const GridSpec grid{1025, 1.0};
    PathSampler sampler(make(ProcessKind::Bm), grid, SamplerMode::Circulant);
    const SamplePath p = sampler.draw(11, 0);
    REQUIRE(p.values(0, 0) == 0.0);
    REQUIRE_FALSE(p.covariance_fallback);
    double sq = 0.0, cross = 0.0;
    for (int i = 1; i <= 1024; ++i) {
        const double d1 = p.values(i, 0) - p.values(i - 1, 0);
        sq += d1 * d1;
        if (i > 1) cross += d1 * (p.values(i - 1, 0) - p.values(i - 2, 0));
    }
    sq /= 1024.0;
    cross /= 1023.0;
    const double dt = 1.0 / 1024.0;
    REQUIRE(sq == Catch::Approx(dt).epsilon(0.15));
    REQUIRE(std::abs(cross) < 5.0 * dt / std::sqrt(1023.0));
}

TEST_CASE("circulant sampler variance matches fbm law", "[procsim][sampling][mc]") {
    const GridSpec grid{1025, 1.0};
    PathSampler sampler(make(ProcessKind::Fbm, 0.3), grid, SamplerMode::Circulant);
    const std::size_t R = 3000;
    double sq_end = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
        const SamplePath p = sampler.draw(5, r);
        sq_end += p.values(1024, 0) * p.values(1024, 0);
    }
    sq_end /= R;
    REQUIRE(sq_end == Catch::Approx(1.0).epsilon(0.09));
}

TEST_CASE("circulant negative-spectrum hook falls back to exact", "[procsim][sampling]") {
    const GridSpec grid{129, 1.0};
    // tol = -1 makes any spectrum look bad, forcing the factorization path
    const SamplePath p = sample_fbm_circulant(0.7, grid, 3, 0, 1, -1.0);
    REQUIRE(p.covariance_fallback);
    REQUIRE(p.values(0, 0) == 0.0);
    REQUIRE(p.values.rows() == 129);

    const SamplePath q = sample_fbm_circulant(0.7, grid, 3, 0);
    REQUIRE_FALSE(q.covariance_fallback);
}

TEST_CASE("multi-coordinate draws have independent components", "[procsim][sampling]") {
    const GridSpec grid{257, 1.0};
    PathSampler sampler(make(ProcessKind::Bm, 0.5, 1.0, 3), grid, SamplerMode::Exact);
    const SamplePath p = sampler.draw(9, 0);
    REQUIRE(p.values.cols() == 3);
    REQUIRE(p.values.col(0) != p.values.col(1));
    // coordinate streams are keyed independently: same as a d=1 draw
    PathSampler scalar(make(ProcessKind::Bm), grid, SamplerMode::Exact);
    REQUIRE(scalar.draw(9, 0).values.col(0) == p.values.col(0));
}

TEST_CASE("covariance matrix and factorization", "[procsim][sampling]") {
    const GridSpec grid{17, 1.0};
    const ProcessDescriptor desc = make(ProcessKind::BifBm, 0.6, 0.5);
    const Eigen::MatrixXd C = covariance_matrix(desc, grid);
    REQUIRE(C.rows() == 16);
    REQUIRE(C(3, 7) == Catch::Approx(cov_bifbm(0.6, 0.5, 4.0 / 16.0, 8.0 / 16.0)).epsilon(1e-14));
    const Eigen::MatrixXd L = factor_covariance(C);
    REQUIRE((L * L.transpose() - C).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(L(0, 1) == 0.0);  // lower triangular

    // rank-deficient but PSD: jitter ladder must cope
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(4, 4);
    const Eigen::MatrixXd Lo = factor_covariance(ones);
    REQUIRE((Lo * Lo.transpose() - ones).cwiseAbs().maxCoeff() < 1e-6);

    // indefinite: must throw after the ladder
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    REQUIRE_THROWS_AS(factor_covariance(bad), NumericalError);
}

TEST_CASE("bifbm empirical covariance matches cov_bifbm", "[procsim][sampling][mc]") {
    const GridSpec grid{17, 1.0};
    const ProcessDescriptor desc = make(ProcessKind::BifBm, 0.6, 0.5);
    PathSampler sampler(desc, grid, SamplerMode::Auto);
    REQUIRE(sampler.resolved_mode() == SamplerMode::Exact);
    const std::size_t R = 3000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(17, 17);
    for (std::size_t r = 0; r < R; ++r) {
        const SamplePath p = sampler.draw(21, r);
        acc += p.values.col(0) * p.values.col(0).transpose();
    }
    acc /= static_cast<double>(R);
    double worst = 0.0;
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 17; ++j)
            worst = std::max(worst, std::abs(acc(i, j) - cov_bifbm(0.6, 0.5, i / 16.0, j / 16.0)));
    REQUIRE(worst < 0.11);  // ~6/sqrt(R) with Var X_1 < 1.1
}

TEST_CASE("she solver shape, determinism, and validation", "[procsim][she]") {
    ProcessDescriptor desc = make(ProcessKind::She);
    desc.she.nx = 64;
    desc.she.x_probe = 0.3;
    const GridSpec grid{257, 0.1};
    const SamplePath a = solve_she(desc, grid, 17, 0);
    const SamplePath b = solve_she(desc, grid, 17, 0);
    REQUIRE(a.values == b.values);
    REQUIRE(a.values.rows() == 257);
    REQUIRE(a.values(0, 0) == 0.0);  // zero initial condition
    REQUIRE(solve_she(desc, grid, 17, 1).values != a.values);
    // probe snapped to a node of the 64-cell mesh
    REQUIRE(a.descriptor.she.x_probe == Catch::Approx(19.0 / 64.0));

    REQUIRE_THROWS_AS(solve_she(make(ProcessKind::Bm), grid, 1, 0), ValidationError);

    ProcessDescriptor degenerate = desc;
    degenerate.she.sigma = SigmaKind::ScaledIdentity;
    degenerate.she.rho = 0.0;
    REQUIRE_THROWS_AS(solve_she(degenerate, grid, 1, 0), ValidationError);
    degenerate.she.allow_degenerate_sigma = true;
    REQUIRE_NOTHROW(check_she_coefficients(degenerate.she));
}

TEST_CASE("she nonlinear coefficients stay finite", "[procsim][she]") {
    ProcessDescriptor desc = make(ProcessKind::She);
    desc.she.nx = 32;
    desc.she.sigma = SigmaKind::Tanh;
    desc.she.b = DriftKind::Tanh;
    const GridSpec grid{257, 1.0};
    const SamplePath p = solve_she(desc, grid, 23, 0);
    REQUIRE(p.values.allFinite());
}

TEST_CASE("she linear variance matches cosine-series oracle", "[procsim][she][mc]") {
    ProcessDescriptor desc = make(ProcessKind::She);
    desc.she.nx = 64;
    desc.she.x_probe = 0.3;
    const GridSpec grid{129, 0.1};
    const std::size_t R = 4000;
    double sq = 0.0;
    double x_snap = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
        const SamplePath p = solve_she(desc, grid, 31, r);
        sq += p.values(128, 0) * p.values(128, 0);
        x_snap = p.descriptor.she.x_probe;
    }
    sq /= R;
    const double oracle = she_linear_variance(0.1, x_snap);
    // sqrt(2/R) ~ 2.2% spread on a variance estimate; 10% covers 3 SE plus
    // the O(dx^2) discretization bias
    REQUIRE(sq == Catch::Approx(oracle).epsilon(0.10));
}

TEST_CASE("moment increment slope recovers 2H", "[procsim][moments]") {
    const GridSpec grid{2049, 1.0};
    const ProcessDescriptor desc = make(ProcessKind::Fbm, 0.7);
    PathSampler sampler(desc, grid, SamplerMode::Circulant);
    std::vector<SamplePath> paths;
    for (std::size_t r = 0; r < 8; ++r) paths.push_back(sampler.draw(13, r));
    const MomentEstimate est = moment_increment_slope(paths, 2.0, {1, 2, 4, 8, 16});
    REQUIRE(est.slope == Catch::Approx(1.4).margin(0.12));
    REQUIRE(est.K_hat > 0.0);

    REQUIRE_THROWS_AS(moment_increment_slope(paths, 2.0, {1, 2, 4}), ValidationError);
    REQUIRE_THROWS_AS(moment_increment_slope(paths, 0.5, {1, 2, 4, 8}), ValidationError);
    REQUIRE_THROWS_AS(moment_increment_slope(paths, 2.0, {1, 2, 4, 5000}), ValidationError);
}
