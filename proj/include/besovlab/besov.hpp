#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "besovlab/errors.hpp"
#include "besovlab/local_time.hpp"

namespace besovlab {

struct BesovQuery {
    double nu = 0.5;
    double p = 2.0;
    std::optional<double> q;
    int J_max = 2;

    void validate(std::size_t n_points) const;
};

enum class ProfileVariant { Path, LocaltimeUniform };

// Per-level dyadic increment statistics, levels j = 0..J_max.
//
// Path variant: A_j is the discrete L^p norm of x -> f(x + 2^-j) - f(x) over
// I(2^-j), left-rectangle rule on the normalized domain [0,1].
//
// LocaltimeUniform variant: A_j is the L^q norm (in the time variable) of
// r -> sup_x |L(x, r + 2^-j) - L(x, r)|; S is the dyadic-cell double sum
// 2^{j q nu - j} int_0^1 sum_k sup_x |...|^q ds, and S_direct the same
// quantity regrouped as 2^{j q nu} A_j^q.  The two agree except for
// floating-point summation order.
struct DyadicProfile {
    ProfileVariant variant = ProfileVariant::Path;
    std::vector<double> A;
    double p = 0.0;  // Path integrability exponent
    double q = 0.0;  // LocaltimeUniform summability exponent
    double nu_ref = 0.0;
    std::vector<double> S;
    std::vector<double> S_direct;

    int J_max() const { return static_cast<int>(A.size()) - 1; }
};

struct RegularityVerdict {
    double nu_hat = 0.0;
    double slope = 0.0;
    bool bounded = false;
    bool blows_up = false;
    bool little_besov = false;
    double tau = 0.1;
};

struct GrrCase {
    double p_exp = 0.0;
    double nu = 0.0;
    double beta = 0.0;
    double B = 0.0;
    std::size_t violations = 0;
    double max_ratio = 0.0;
};

// sup over grid shifts |h| <= t of the discrete L^p increment norm over I(h).
double modulus_lp(const Eigen::MatrixXd& f_samples, double p, double t);
double modulus_lp(const std::vector<double>& f_samples, double p, double t);

// A_j for j = 0..J_max; vector-valued samples use the Euclidean increment norm.
DyadicProfile dyadic_profile(const Eigen::MatrixXd& f_samples, double p, int J_max);
DyadicProfile dyadic_profile(const std::vector<double>& f_samples, double p, int J_max);

// sup_j 2^{j nu} A_j over the stored levels.
double seminorm_from_profile(const DyadicProfile& profile, double nu);

// (sum_j 2^{j q nu} A_j^q)^{1/q} over the stored levels.
double besov_pq_norm(const DyadicProfile& profile, double nu, double q);

// Uniform local-time dyadic statistic S_j, with the direct form kept
// alongside for cross-validation.
DyadicProfile uniform_localtime_statistic(const LocalTimeField& field, double q, double nu,
                                          int J_max);

// Shift-sup variant at a single level: sup over grid shifts h <= 2^-j of the
// statistic that S_direct computes at h = 2^-j exactly.  Test-scale only
// (cost grows like n^2 for small j).
double shiftsup_localtime_statistic(const LocalTimeField& field, double q, double nu, int j);

// Least-squares slope of log2(2^{j nu} A_j) (scaled by q for the local-time
// variant) over the upper half window j in [ceil(J_max/2), J_max].
RegularityVerdict classify_regularity(const DyadicProfile& profile, double nu, double tau = 0.1);

// nu_hat = -(least-squares slope of log2 A_j) over the upper half window.
double estimate_exponent(const DyadicProfile& profile);

// Continuity-from-integral bound with Psi(u) = |u|^p, p(u) = |u|^(nu+beta/p):
// checks |g(z)-g(y)| <= 8 (4B)^{1/p} (nu+beta/p)/(nu+(beta-2)/p)
// |z-y|^{nu+(beta-2)/p} on all grid pairs, with a 1.05 quadrature slack.
GrrCase grr_check(const std::vector<double>& g_samples, double p_exp, double nu, double beta);

}  // namespace besovlab
