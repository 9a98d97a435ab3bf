#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "besovlab/grid.hpp"
#include "besovlab/process.hpp"

namespace besovlab {

struct SamplePath {
    std::vector<double> times;
    Eigen::MatrixXd values;  // n_points x d, values.row(0) == 0
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    ProcessDescriptor descriptor;
    bool covariance_fallback = false;  // circulant embedding fell back to factorization

    std::size_t n_points() const { return times.size(); }
    int d() const { return static_cast<int>(values.cols()); }
};

// Dense covariance of the grid restricted to t > 0 (the t = 0 row is identically 0).
Eigen::MatrixXd covariance_matrix(const ProcessDescriptor& desc, const GridSpec& grid);

// Lower-triangular L with L L^T = C + jitter*I, escalating jitter through
// 1e-14 / 1e-12 / 1e-10 before giving up.
Eigen::MatrixXd factor_covariance(Eigen::MatrixXd C);

enum class SamplerMode { Auto, Exact, Circulant };

// Reusable sampler: the covariance factorization (or circulant spectrum) is
// computed once and shared by every draw.  draw() is safe to call from
// several threads at once.
class PathSampler {
public:
    PathSampler(const ProcessDescriptor& desc, const GridSpec& grid,
                SamplerMode mode = SamplerMode::Auto);

    SamplePath draw(std::uint64_t seed, std::uint64_t replicate) const;

    SamplerMode resolved_mode() const { return mode_; }

private:
    ProcessDescriptor desc_;
    GridSpec grid_;
    SamplerMode mode_;
    Eigen::MatrixXd chol_;             // Exact mode
    std::vector<double> circ_scale_;   // Circulant mode: sqrt(lambda_k / M) etc.
    bool circ_ok_ = false;
};

std::vector<SamplePath> sample_gaussian_paths(const ProcessDescriptor& desc,
                                              const GridSpec& grid, std::uint64_t seed,
                                              std::size_t n_reps);

// Fast path for stationary-increment covariances (K = 1).  Falls back to
// covariance factorization when the embedding spectrum dips below
// -neg_eig_tol, recording the fallback on the returned path.
SamplePath sample_fbm_circulant(double H, const GridSpec& grid, std::uint64_t seed,
                                std::uint64_t replicate = 0, int d = 1,
                                double neg_eig_tol = 1e-8);

}  // namespace besovlab
