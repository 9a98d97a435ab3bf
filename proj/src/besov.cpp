#include "besovlab/besov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "besovlab/stats.hpp"

namespace besovlab {

namespace {

Eigen::Map<const Eigen::MatrixXd> as_column(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), static_cast<Eigen::Index>(v.size()), 1);
}

// Discrete L^p norm of the step-shift increment over I(h), left-rectangle
// rule on [0,1]: sum runs over i with (i + step) <= n-1, right endpoint
// excluded so the measure of I(h) comes out exactly 1 - h.
double increment_norm(const Eigen::MatrixXd& f, double p, std::size_t step) {
    const std::size_t n = f.rows();
    if (step + 1 > n) return 0.0;
    const std::size_t count = n - 1 - step;  // i = 0 .. count-1
    if (count == 0) return 0.0;
    const double delta = 1.0 / static_cast<double>(n - 1);
    double acc = 0.0;
    if (f.cols() == 1) {
        for (std::size_t i = 0; i < count; ++i)
            acc += std::pow(std::abs(f(i + step, 0) - f(i, 0)), p);
    } else {
        for (std::size_t i = 0; i < count; ++i)
            acc += std::pow((f.row(i + step) - f.row(i)).norm(), p);
    }
    return std::pow(acc * delta, 1.0 / p);
}

int window_start(int J_max) { return (J_max + 1) / 2; }

// Window y-values for the slope regression; throws if a level is empty.
void window_fit(const DyadicProfile& profile, double nu, LineFit* fit) {
    const int J = profile.J_max();
    if (J + 1 < 6)
        throw ValidationError("profile needs >= 6 levels for slope analysis, has " +
                              std::to_string(J + 1));
    std::vector<double> xs, ys;
    for (int j = window_start(J); j <= J; ++j) {
        const double A = profile.A[j];
        if (!(A > 0.0))
            throw ValidationError("slope analysis: A_j = 0 at level " + std::to_string(j) +
                                  " inside the regression window");
        double y = static_cast<double>(j) * nu + std::log2(A);
        if (profile.variant == ProfileVariant::LocaltimeUniform) y *= profile.q;
        xs.push_back(static_cast<double>(j));
        ys.push_back(y);
    }
    *fit = least_squares(xs, ys);
}

}  // namespace

void BesovQuery::validate(std::size_t n_points) const {
    if (!(nu > 0.0 && nu < 1.0))
        throw ValidationError("besov query: nu must lie in (0,1)");
    if (!(p >= 1.0))
        throw ValidationError("besov query: p must be >= 1");
    if (q && !(*q >= 1.0))
        throw ValidationError("besov query: q must be >= 1");
    if (J_max < 2)
        throw ValidationError("besov query: J_max must be >= 2");
    const std::size_t m = n_points - 1;
    const std::size_t span = std::size_t{1} << J_max;
    if (J_max >= 63 || span > m / 4 || m % span != 0)
        throw ValidationError("besov query: 2^J_max must divide n_points-1 and be <= (n_points-1)/4");
}

double modulus_lp(const Eigen::MatrixXd& f_samples, double p, double t) {
    if (t < 0.0)
        throw ValidationError("modulus_lp: t must be >= 0");
    if (t > 1.0 + 1e-12)
        throw ValidationError("modulus_lp: t must be <= 1");
    if (!(p >= 1.0))
        throw ValidationError("modulus_lp: p must be >= 1");
    const std::size_t n = f_samples.rows();
    if (n < 2)
        throw ValidationError("modulus_lp: need >= 2 samples");
    const std::size_t max_step =
        static_cast<std::size_t>(std::floor(t * static_cast<double>(n - 1) + 1e-9));
    double sup = 0.0;
    for (std::size_t step = 1; step <= max_step; ++step)
        sup = std::max(sup, increment_norm(f_samples, p, step));
    return sup;
}

double modulus_lp(const std::vector<double>& f_samples, double p, double t) {
    return modulus_lp(Eigen::MatrixXd(as_column(f_samples)), p, t);
}

DyadicProfile dyadic_profile(const Eigen::MatrixXd& f_samples, double p, int J_max) {
    if (!(p >= 1.0))
        throw ValidationError("dyadic_profile: p must be >= 1");
    const std::size_t n = f_samples.rows();
    if (n < 2)
        throw ValidationError("dyadic_profile: need >= 2 samples");
    const std::size_t m = n - 1;
    if (J_max < 0 || J_max >= 63 || m % (std::size_t{1} << J_max) != 0)
        throw ValidationError("dyadic_profile: 2^J_max must divide n_points-1");
    DyadicProfile profile;
    profile.variant = ProfileVariant::Path;
    profile.p = p;
    profile.A.resize(J_max + 1);
    for (int j = 0; j <= J_max; ++j)
        profile.A[j] = increment_norm(f_samples, p, m >> j);
    return profile;
}

DyadicProfile dyadic_profile(const std::vector<double>& f_samples, double p, int J_max) {
    return dyadic_profile(Eigen::MatrixXd(as_column(f_samples)), p, J_max);
}

double seminorm_from_profile(const DyadicProfile& profile, double nu) {
    if (profile.A.empty())
        throw ValidationError("seminorm_from_profile: empty profile");
    double sup = 0.0;
    for (int j = 0; j <= profile.J_max(); ++j)
        sup = std::max(sup, std::exp2(static_cast<double>(j) * nu) * profile.A[j]);
    return sup;
}

double besov_pq_norm(const DyadicProfile& profile, double nu, double q) {
    if (!(q >= 1.0))
        throw ValidationError("besov_pq_norm: q must be >= 1");
    if (profile.A.empty())
        throw ValidationError("besov_pq_norm: empty profile");
    double acc = 0.0;
    for (int j = 0; j <= profile.J_max(); ++j)
        acc += std::exp2(static_cast<double>(j) * q * nu) * std::pow(profile.A[j], q);
    return std::pow(acc, 1.0 / q);
}

DyadicProfile uniform_localtime_statistic(const LocalTimeField& field, double q, double nu,
                                          int J_max) {
    if (!(q >= 1.0))
        throw ValidationError("uniform_localtime_statistic: q must be >= 1");
    const std::size_t n = field.n_times();
    const std::size_t m = n - 1;
    if (J_max < 0 || J_max >= 63 || (std::size_t{1} << J_max) > m ||
        m % (std::size_t{1} << J_max) != 0)
        throw ValidationError("uniform_localtime_statistic: J_max beyond field resolution");

    DyadicProfile profile;
    profile.variant = ProfileVariant::LocaltimeUniform;
    profile.q = q;
    profile.nu_ref = nu;
    profile.A.assign(J_max + 1, 0.0);
    profile.S.assign(J_max + 1, 0.0);
    profile.S_direct.assign(J_max + 1, 0.0);

    const double delta = 1.0 / static_cast<double>(m);
    std::vector<double> term(m, 0.0);
    for (int j = 0; j <= J_max; ++j) {
        const std::size_t R = m >> j;
        const std::size_t cells = std::size_t{1} << j;
        if (cells < 2) continue;  // j = 0: I(1) has measure zero
        const std::size_t n_idx = m - R;  // idx = 0 .. n_idx-1
        for (std::size_t idx = 0; idx < n_idx; ++idx) {
            const std::uint32_t* lo = field.slice(idx);
            const std::uint32_t* hi = field.slice(idx + R);
            std::uint32_t best = 0;
            for (std::size_t b = 0; b < field.n_bins_total; ++b) {
                const std::uint32_t diff = hi[b] - lo[b];
                if (diff > best) best = diff;
            }
            term[idx] = std::pow(field.weight * static_cast<double>(best), q);
        }
        // Dyadic double sum: offset integral outermost, then cells.
        double s_sum = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
            double cell_sum = 0.0;
            for (std::size_t k = 1; k < cells; ++k) cell_sum += term[(k - 1) * R + r];
            s_sum += cell_sum;
        }
        const double jd = static_cast<double>(j);
        profile.S[j] = std::exp2(jd * q * nu - jd) * s_sum / static_cast<double>(R);
        // Direct form: single pass in time order.
        double a_sum = 0.0;
        for (std::size_t idx = 0; idx < n_idx; ++idx) a_sum += term[idx];
        a_sum *= delta;
        profile.A[j] = std::pow(a_sum, 1.0 / q);
        profile.S_direct[j] = std::exp2(jd * q * nu) * a_sum;
    }
    return profile;
}

double shiftsup_localtime_statistic(const LocalTimeField& field, double q, double nu, int j) {
    if (!(q >= 1.0))
        throw ValidationError("shiftsup_localtime_statistic: q must be >= 1");
    const std::size_t n = field.n_times();
    const std::size_t m = n - 1;
    if (j < 0 || j >= 63 || (std::size_t{1} << j) > m || m % (std::size_t{1} << j) != 0)
        throw ValidationError("shiftsup_localtime_statistic: level beyond field resolution");
    const std::size_t R = m >> j;
    const double delta = 1.0 / static_cast<double>(m);
    double sup = 0.0;
    for (std::size_t step = 1; step <= R; ++step) {
        double a_sum = 0.0;
        for (std::size_t idx = 0; idx + step < m; ++idx) {
            const std::uint32_t* lo = field.slice(idx);
            const std::uint32_t* hi = field.slice(idx + step);
            std::uint32_t best = 0;
            for (std::size_t b = 0; b < field.n_bins_total; ++b) {
                const std::uint32_t diff = hi[b] - lo[b];
                if (diff > best) best = diff;
            }
            a_sum += std::pow(field.weight * static_cast<double>(best), q);
        }
        sup = std::max(sup, a_sum * delta);
    }
    return std::exp2(static_cast<double>(j) * q * nu) * sup;
}

RegularityVerdict classify_regularity(const DyadicProfile& profile, double nu, double tau) {
    if (!(tau > 0.0))
        throw ValidationError("classify_regularity: tau must be > 0");
    LineFit fit;
    window_fit(profile, nu, &fit);
    RegularityVerdict verdict;
    verdict.tau = tau;
    verdict.slope = fit.slope;
    verdict.bounded = fit.slope <= tau;
    verdict.blows_up = !verdict.bounded;
    verdict.little_besov = fit.slope <= -tau;
    const double scale = profile.variant == ProfileVariant::LocaltimeUniform ? profile.q : 1.0;
    verdict.nu_hat = nu - fit.slope / scale;
    return verdict;
}

double estimate_exponent(const DyadicProfile& profile) {
    LineFit fit;
    window_fit(profile, 0.0, &fit);
    const double scale = profile.variant == ProfileVariant::LocaltimeUniform ? profile.q : 1.0;
    return -fit.slope / scale;
}

GrrCase grr_check(const std::vector<double>& g_samples, double p_exp, double nu, double beta) {
    if (!(p_exp >= 1.0))
        throw ValidationError("grr_check: p must be >= 1");
    if (!(nu > 0.0 && nu < 1.0))
        throw ValidationError("grr_check: nu must lie in (0,1)");
    if (!(nu + beta / p_exp > 0.0))
        throw ValidationError("grr_check: measure exponent nu + beta/p must be positive");
    const double rhs_exp = nu + (beta - 2.0) / p_exp;
    if (!(rhs_exp > 0.0))
        throw ValidationError("grr_check: nu + (beta-2)/p must be positive for a finite bound");
    const std::size_t n = g_samples.size();
    if (n < 2)
        throw ValidationError("grr_check: need >= 2 samples");

    const double delta = 1.0 / static_cast<double>(n - 1);
    const double denom_exp = nu * p_exp + beta;
    double B = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;  // integrand extends continuously by 0 on the diagonal
            const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            const double dg = std::abs(g_samples[i] - g_samples[j]);
            const double dx = std::abs(static_cast<double>(i) - static_cast<double>(j)) * delta;
            B += wi * wj * std::pow(dg, p_exp) / std::pow(dx, denom_exp);
        }
    }
    B *= delta * delta;

    GrrCase result;
    result.p_exp = p_exp;
    result.nu = nu;
    result.beta = beta;
    result.B = B;
    const double front = 8.0 * std::pow(4.0 * B, 1.0 / p_exp) * (nu + beta / p_exp) / rhs_exp;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double lhs = std::abs(g_samples[i] - g_samples[j]);
            const double dist = static_cast<double>(j - i) * delta;
            const double rhs = front * std::pow(dist, rhs_exp);
            if (rhs > 0.0) {
                result.max_ratio = std::max(result.max_ratio, lhs / rhs);
                if (lhs > 1.05 * rhs) ++result.violations;
            } else if (lhs > 0.0) {
                ++result.violations;
                result.max_ratio = std::numeric_limits<double>::infinity();
            }
        }
    }
    return result;
}

}  // namespace besovlab
