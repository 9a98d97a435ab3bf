#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "besovlab/process.hpp"

namespace besovlab {

struct CharFnQuery {
    std::vector<double> times;  // t_1 < ... < t_m in (0,1]; t_0 = 0 is implicit
    Eigen::MatrixXd v;          // m x d frequencies
    Eigen::MatrixXi k;          // m x d non-negative exponents
    double alpha = 0.5;

    int m() const { return static_cast<int>(times.size()); }
    void validate(int d) const;
};

// Covariance matrix of the increments (Y_{t_j} - Y_{t_{j-1}})_j of one scalar
// coordinate, t_0 = 0.
Eigen::MatrixXd increment_covariance(const ProcessDescriptor& desc,
                                     const std::vector<double>& times);

// |E exp(i sum_j <v_j, X_{t_j} - X_{t_{j-1}}>)| = exp(-Var/2) for Gaussian
// descriptors with independent coordinates.
double gaussian_charfn(const CharFnQuery& query, const ProcessDescriptor& desc);

struct LndSampleSpec {
    int refine_level = 8;    // v-magnitude grid has 2^level + 1 nested points
    int time_level = 4;      // times on the dyadic grid {i / 2^time_level}
    double window = 0.5;     // t_m - t_1 < window
    double mag_lo = 1e-2;    // log-uniform magnitude range
    double mag_hi = 1e3;
    bool include_zero = true;
    std::size_t n_random = 0;  // extra random draws (required when m*d > 3)
    std::uint64_t seed = 0;
};

struct LndReport {
    double c_empirical = 0.0;  // max |charfn| prod |v|^k dt^(alpha k)
    std::size_t n_samples = 0;
    std::vector<double> argmax_times;
    Eigen::MatrixXd argmax_v;
    double window = 0.5;
};

// Empirical constant of the characteristic-function decay bound: the max of
// |charfn| * prod_{j,l} |v_{j,l}|^{k_{j,l}} (t_j - t_{j-1})^{alpha k_{j,l}}
// over deterministic nested grids (and optional random draws).  Finite,
// stabilizing values under refinement witness the bound numerically.
LndReport alphalnd_constant(const ProcessDescriptor& desc, int m,
                            const Eigen::MatrixXi& k_matrix, double alpha,
                            const LndSampleSpec& spec);

// Var(sum_j v_j (Y_{t_j} - Y_{t_{j-1}})) / sum_j v_j^2 Var(Y_{t_j} - Y_{t_{j-1}}).
double berman_lnd_ratio(const ProcessDescriptor& desc, const std::vector<double>& times,
                        const std::vector<double>& v);

// (min, max) of Var(Y_t - Y_s) / (t-s)^{2 alpha} over the supplied pairs.
std::pair<double, double> variance_bounds_check(
    const ProcessDescriptor& desc, double alpha,
    const std::vector<std::pair<double, double>>& pairs);

}  // namespace besovlab
