#include "besovlab/sampling.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "besovlab/rng.hpp"
#include "besovlab/she.hpp"

namespace besovlab {

namespace {

std::mutex fftw_planner_mutex;

// Forward DFT of a real vector; returns the real parts (imaginary parts of a
// symmetric input are rounding noise).
std::vector<double> fft_real_parts(const std::vector<double>& in) {
    const std::size_t M = in.size();
    fftw_complex* buf = fftw_alloc_complex(M);
    fftw_complex* out = fftw_alloc_complex(M);
    for (std::size_t i = 0; i < M; ++i) {
        buf[i][0] = in[i];
        buf[i][1] = 0.0;
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(M), buf, out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::vector<double> re(M);
    for (std::size_t i = 0; i < M; ++i) re[i] = out[i][0];
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    fftw_free(out);
    return re;
}

// Autocovariance of fBm increments at grid spacing dt.
double fbm_increment_autocov(double H, double dt, std::size_t lag) {
    const double k = static_cast<double>(lag);
    const double twoH = 2.0 * H;
    return 0.5 * std::pow(dt, twoH) *
           (std::pow(k + 1.0, twoH) - 2.0 * std::pow(k, twoH) +
            std::pow(std::abs(k - 1.0), twoH));
}

// Eigenvalues of the circulant embedding (size 2m) of the increment
// autocovariance.
std::vector<double> circulant_eigenvalues(double H, double dt, std::size_t m) {
    const std::size_t M = 2 * m;
    std::vector<double> c(M);
    for (std::size_t k = 0; k <= m; ++k) c[k] = fbm_increment_autocov(H, dt, k);
    for (std::size_t k = 1; k < m; ++k) c[M - k] = c[k];
    return fft_real_parts(c);
}

void check_gaussian(const ProcessDescriptor& desc, const char* who) {
    if (!desc.gaussian())
        throw ValidationError(std::string(who) + ": descriptor must be Gaussian (Bm/Fbm/BifBm)");
}

}  // namespace

Eigen::MatrixXd covariance_matrix(const ProcessDescriptor& desc, const GridSpec& grid) {
    check_gaussian(desc, "covariance_matrix");
    desc.validate();
    grid.validate();
    const std::size_t n = grid.n_points - 1;  // t = 0 excluded
    const double dt = grid.spacing();
    double Heff = 0.5, Keff = 1.0;
    if (desc.kind == ProcessKind::Fbm) Heff = desc.H;
    if (desc.kind == ProcessKind::BifBm) {
        Heff = desc.H;
        Keff = desc.K;
    }
    // cov(s,t) = 2^-K ((t^2H + s^2H)^K - |t-s|^2HK); the |t-s| term depends
    // only on |i-j| on a uniform grid, so both pow tables are precomputed.
    std::vector<double> a(n + 1), dist(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = dt * static_cast<double>(i);
        a[i] = std::pow(t, 2.0 * Heff);
        dist[i] = std::pow(t, 2.0 * Heff * Keff);
    }
    const double scale = std::exp2(-Keff);
    Eigen::MatrixXd C(n, n);
    if (Keff == 1.0) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double v = scale * (a[i + 1] + a[j + 1] - dist[i - j]);
                C(i, j) = v;
                C(j, i) = v;
            }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double v = scale * (std::pow(a[i + 1] + a[j + 1], Keff) - dist[i - j]);
                C(i, j) = v;
                C(j, i) = v;
            }
    }
    return C;
}

Eigen::MatrixXd factor_covariance(Eigen::MatrixXd C) {
    // In-place factorization: at n = 16k the matrix is ~2 GB, so no second
    // matrix-sized allocation is affordable.  A failed in-place LLT clobbers
    // only the lower triangle; the upper triangle plus the saved diagonal
    // restore C for the next jitter level.
    const double jitters[] = {0.0, 1e-14, 1e-12, 1e-10};
    const Eigen::VectorXd diag0 = C.diagonal();
    bool first = true;
    for (double j : jitters) {
        if (!first) {
            C.triangularView<Eigen::StrictlyLower>() =
                C.triangularView<Eigen::StrictlyUpper>().transpose();
            C.diagonal() = diag0;
        }
        first = false;
        if (j > 0.0) C.diagonal().array() += j;
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(C);
        if (llt.info() == Eigen::Success) {
            C.triangularView<Eigen::StrictlyUpper>().setZero();
            return C;
        }
    }
    throw NumericalError("covariance factorization failed after jitter 1e-10; grid size " +
                         std::to_string(C.rows() + 1));
}

PathSampler::PathSampler(const ProcessDescriptor& desc, const GridSpec& grid, SamplerMode mode)
    : desc_(desc), grid_(grid), mode_(mode) {
    desc_.validate();
    grid_.validate();
    if (desc_.kind == ProcessKind::She) {
        mode_ = SamplerMode::Auto;  // solver; Exact/Circulant make no sense here
        return;
    }
    if (mode_ == SamplerMode::Auto)
        mode_ = (desc_.kind == ProcessKind::BifBm && desc_.K < 1.0) ? SamplerMode::Exact
                                                                    : SamplerMode::Circulant;
    if (mode_ == SamplerMode::Circulant) {
        const std::size_t m = grid_.n_points - 1;
        const double Heff = desc_.kind == ProcessKind::Bm ? 0.5 : desc_.H;
        const std::vector<double> lambda = circulant_eigenvalues(Heff, grid_.spacing(), m);
        const std::size_t M = 2 * m;
        double lambda_min = lambda[0];
        for (double l : lambda) lambda_min = std::min(lambda_min, l);
        if (lambda_min < -1e-8) {
            circ_ok_ = false;  // spectrum genuinely negative: factorize instead
        } else {
            circ_ok_ = true;
            circ_scale_.resize(m + 1);
            for (std::size_t k = 0; k <= m; ++k) {
                const double l = std::max(lambda[k], 0.0);
                const double denom = (k == 0 || k == m) ? static_cast<double>(M)
                                                        : 2.0 * static_cast<double>(M);
                circ_scale_[k] = std::sqrt(l / denom);
            }
        }
    }
    if (mode_ == SamplerMode::Exact || (mode_ == SamplerMode::Circulant && !circ_ok_))
        chol_ = factor_covariance(covariance_matrix(desc_, grid_));
}

SamplePath PathSampler::draw(std::uint64_t seed, std::uint64_t replicate) const {
    SamplePath path;
    path.seed = seed;
    path.replicate = replicate;
    path.descriptor = desc_;
    if (desc_.kind == ProcessKind::She) return solve_she(desc_, grid_, seed, replicate);

    path.times = grid_.times();
    const std::size_t n = grid_.n_points;
    path.values = Eigen::MatrixXd::Zero(n, desc_.d);

    if (mode_ == SamplerMode::Circulant && circ_ok_) {
        const std::size_t m = n - 1;
        const std::size_t M = 2 * m;
        std::vector<double> buf(M);
        for (int l = 0; l < desc_.d; ++l) {
            GaussianStream g(seed, replicate, static_cast<std::uint64_t>(l));
            fftw_complex* Z = fftw_alloc_complex(M);
            fftw_complex* out = fftw_alloc_complex(M);
            Z[0][0] = circ_scale_[0] * g();
            Z[0][1] = 0.0;
            Z[m][0] = circ_scale_[m] * g();
            Z[m][1] = 0.0;
            for (std::size_t k = 1; k < m; ++k) {
                const double u = g(), v = g();
                Z[k][0] = circ_scale_[k] * u;
                Z[k][1] = circ_scale_[k] * v;
                Z[M - k][0] = Z[k][0];
                Z[M - k][1] = -Z[k][1];
            }
            fftw_plan plan;
            {
                std::lock_guard<std::mutex> lock(fftw_planner_mutex);
                plan = fftw_plan_dft_1d(static_cast<int>(M), Z, out, FFTW_FORWARD, FFTW_ESTIMATE);
            }
            fftw_execute(plan);
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                acc += out[i][0];
                path.values(i + 1, l) = acc;
            }
            {
                std::lock_guard<std::mutex> lock(fftw_planner_mutex);
                fftw_destroy_plan(plan);
            }
            fftw_free(Z);
            fftw_free(out);
        }
        return path;
    }

    // Exact draw via the shared factor.
    path.covariance_fallback = (mode_ == SamplerMode::Circulant);
    Eigen::VectorXd z(n - 1);
    for (int l = 0; l < desc_.d; ++l) {
        GaussianStream g(seed, replicate, static_cast<std::uint64_t>(l));
        for (std::size_t i = 0; i + 1 < n; ++i) z(i) = g();
        path.values.col(l).tail(n - 1) = chol_.triangularView<Eigen::Lower>() * z;
    }
    return path;
}

std::vector<SamplePath> sample_gaussian_paths(const ProcessDescriptor& desc,
                                              const GridSpec& grid, std::uint64_t seed,
                                              std::size_t n_reps) {
    check_gaussian(desc, "sample_gaussian_paths");
    PathSampler sampler(desc, grid, SamplerMode::Exact);
    std::vector<SamplePath> paths;
    paths.reserve(n_reps);
    for (std::size_t r = 0; r < n_reps; ++r) paths.push_back(sampler.draw(seed, r));
    return paths;
}

SamplePath sample_fbm_circulant(double H, const GridSpec& grid, std::uint64_t seed,
                                std::uint64_t replicate, int d, double neg_eig_tol) {
    if (!(H > 0.0 && H < 1.0))
        throw ValidationError("sample_fbm_circulant: H must lie in (0,1)");
    grid.validate();
    ProcessDescriptor desc;
    desc.kind = ProcessKind::Fbm;
    desc.H = H;
    desc.d = d;

    const std::size_t m = grid.n_points - 1;
    const std::vector<double> lambda = circulant_eigenvalues(H, grid.spacing(), m);
    double lambda_min = lambda[0];
    for (double l : lambda) lambda_min = std::min(lambda_min, l);
    if (lambda_min < -neg_eig_tol) {
        PathSampler fallback(desc, grid, SamplerMode::Exact);
        SamplePath path = fallback.draw(seed, replicate);
        path.covariance_fallback = true;
        return path;
    }
    PathSampler sampler(desc, grid, SamplerMode::Circulant);
    return sampler.draw(seed, replicate);
}

}  // namespace besovlab
