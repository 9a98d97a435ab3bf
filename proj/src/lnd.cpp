#include "besovlab/lnd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "besovlab/rng.hpp"

namespace besovlab {

namespace {

void check_gaussian(const ProcessDescriptor& desc, const char* who) {
    if (!desc.gaussian())
        throw UnsupportedError(std::string(who) +
                               ": no closed characteristic function for She");
    desc.validate();
}

double quadratic_form(const Eigen::MatrixXd& C, const Eigen::VectorXd& w) {
    return w.dot(C * w);
}

// Total variance of sum_{j,l} v_{j,l} (Y^l_{t_j} - Y^l_{t_{j-1}}): coordinates
// are independent copies, so the scalar increment covariance serves each column.
double combination_variance(const Eigen::MatrixXd& C, const Eigen::MatrixXd& v) {
    double var = 0.0;
    for (Eigen::Index l = 0; l < v.cols(); ++l) var += quadratic_form(C, v.col(l));
    return std::max(var, 0.0);
}

}  // namespace

void CharFnQuery::validate(int d) const {
    if (m() < 2)
        throw ValidationError("charfn query: need m >= 2 increment times");
    for (int j = 0; j < m(); ++j) {
        if (!(times[j] > 0.0 && times[j] <= 1.0))
            throw ValidationError("charfn query: times must lie in (0,1]");
        if (j > 0 && !(times[j] > times[j - 1]))
            throw ValidationError("charfn query: times must be strictly increasing");
    }
    if (v.rows() != m() || v.cols() != d || k.rows() != m() || k.cols() != d)
        throw ValidationError("charfn query: v and k must be m x d");
    if ((k.array() < 0).any())
        throw ValidationError("charfn query: exponents k must be non-negative");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("charfn query: alpha must lie in (0,1)");
}

Eigen::MatrixXd increment_covariance(const ProcessDescriptor& desc,
                                     const std::vector<double>& times) {
    check_gaussian(desc, "increment_covariance");
    const int m = static_cast<int>(times.size());
    if (m < 1) throw ValidationError("increment_covariance: need >= 1 time");
    for (int j = 0; j < m; ++j) {
        if (!(times[j] > 0.0) || (j > 0 && !(times[j] > times[j - 1])))
            throw ValidationError("increment_covariance: times must be positive and increasing");
    }
    auto at = [&](int j) { return j < 0 ? 0.0 : times[j]; };
    Eigen::MatrixXd C(m, m);
    for (int j = 0; j < m; ++j)
        for (int l = 0; l <= j; ++l) {
            const double c = covariance(desc, at(j), at(l)) - covariance(desc, at(j), at(l - 1)) -
                             covariance(desc, at(j - 1), at(l)) +
                             covariance(desc, at(j - 1), at(l - 1));
            C(j, l) = c;
            C(l, j) = c;
        }
    return C;
}

double gaussian_charfn(const CharFnQuery& query, const ProcessDescriptor& desc) {
    check_gaussian(desc, "gaussian_charfn");
    query.validate(desc.d);
    const Eigen::MatrixXd C = increment_covariance(desc, query.times);
    return std::exp(-0.5 * combination_variance(C, query.v));
}

LndReport alphalnd_constant(const ProcessDescriptor& desc, int m,
                            const Eigen::MatrixXi& k_matrix, double alpha,
                            const LndSampleSpec& spec) {
    check_gaussian(desc, "alphalnd_constant");
    if (m < 2) throw ValidationError("alphalnd_constant: need m >= 2");
    if (k_matrix.rows() != m || k_matrix.cols() != desc.d)
        throw ValidationError("alphalnd_constant: k matrix must be m x d");
    if ((k_matrix.array() < 0).any())
        throw ValidationError("alphalnd_constant: exponents k must be non-negative");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("alphalnd_constant: alpha must lie in (0,1)");
    if (!(spec.window > 0.0) || !(spec.mag_lo > 0.0) || !(spec.mag_hi > spec.mag_lo))
        throw ValidationError("alphalnd_constant: bad sample spec");

    const int md = m * desc.d;
    const std::size_t n_mag = (std::size_t{1} << spec.refine_level) + 1;
    const std::size_t n_signs = std::size_t{1} << (md - 1);

    // Dyadic times with t_m - t_1 < window.
    const std::size_t nt = std::size_t{1} << spec.time_level;
    std::vector<std::vector<double>> tuples;
    std::vector<double> tuple(m);
    auto build_tuples = [&](auto&& self, int depth, std::size_t start) -> void {
        if (depth == m) {
            tuples.push_back(tuple);
            return;
        }
        for (std::size_t i = start; i <= nt; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(nt);
            if (depth > 0 && !(t - tuple[0] < spec.window)) break;
            tuple[depth] = t;
            self(self, depth + 1, i + 1);
        }
    };
    build_tuples(build_tuples, 0, 1);

    double eval_budget = static_cast<double>(tuples.size()) * static_cast<double>(n_signs);
    for (int i = 0; i < md; ++i) eval_budget *= static_cast<double>(n_mag);
    if (eval_budget > 2e8) {
        if (spec.n_random > 0) {
            tuples.clear();  // random-only sweep
        } else {
            throw ValidationError(
                "alphalnd_constant: deterministic grid too large for m*d = " +
                std::to_string(md) + "; lower refine_level or set n_random");
        }
    }

    std::vector<double> mag(n_mag), log_mag(n_mag);
    const double log_ratio = std::log(spec.mag_hi / spec.mag_lo);
    for (std::size_t g = 0; g < n_mag; ++g) {
        const double f = static_cast<double>(g) / static_cast<double>(n_mag - 1);
        mag[g] = spec.mag_lo * std::exp(log_ratio * f);
        log_mag[g] = std::log(mag[g]);
    }

    LndReport report;
    report.window = spec.window;
    double best_logw = -std::numeric_limits<double>::infinity();
    double best_plain = 0.0;  // for the all-k-zero / zero-frequency candidates
    bool have_plain = false;
    std::vector<double> best_times;
    Eigen::MatrixXd best_v;

    const bool all_k_zero = (k_matrix.array() == 0).all();
    if (spec.include_zero) {
        // v = 0 contributes prod |0|^k: 1 when every k is 0, else 0.
        const double w = all_k_zero ? 1.0 : 0.0;
        best_plain = w;
        have_plain = true;
        best_times.assign(m, 0.0);
        best_v = Eigen::MatrixXd::Zero(m, desc.d);
        ++report.n_samples;
    }

    Eigen::MatrixXd v(m, desc.d);
    auto consider = [&](const std::vector<double>& times, const Eigen::MatrixXd& C,
                        double dt_part) {
        // log weight = -Var/2 + sum k log|v| + cached dt part
        const double var = combination_variance(C, v);
        double logw = -0.5 * var + dt_part;
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < desc.d; ++l) {
                const int kk = k_matrix(j, l);
                if (kk > 0) logw += static_cast<double>(kk) * std::log(std::abs(v(j, l)));
            }
        ++report.n_samples;
        if (logw > best_logw) {
            best_logw = logw;
            best_times = times;
            best_v = v;
        }
    };

    for (const std::vector<double>& times : tuples) {
        const Eigen::MatrixXd C = increment_covariance(desc, times);
        double dt_part = 0.0;
        for (int j = 0; j < m; ++j) {
            const double dt = times[j] - (j > 0 ? times[j - 1] : 0.0);
            for (int l = 0; l < desc.d; ++l)
                dt_part += alpha * static_cast<double>(k_matrix(j, l)) * std::log(dt);
        }
        std::vector<std::size_t> idx(md, 0);
        while (true) {
            for (std::size_t s = 0; s < n_signs; ++s) {
                for (int e = 0; e < md; ++e) {
                    const double sign = (e > 0 && (s >> (e - 1)) & 1) ? -1.0 : 1.0;
                    v(e / desc.d, e % desc.d) = sign * mag[idx[e]];
                }
                consider(times, C, dt_part);
            }
            int e = 0;
            for (; e < md; ++e) {
                if (++idx[e] < n_mag) break;
                idx[e] = 0;
            }
            if (e == md) break;
        }
    }

    if (spec.n_random > 0) {
        std::mt19937_64 engine(splitmix64(spec.seed ^ 0x9e3779b97f4a7c15ULL));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> times(m);
        for (std::size_t draw = 0; draw < spec.n_random; ++draw) {
            for (int attempt = 0;; ++attempt) {
                for (int j = 0; j < m; ++j) times[j] = std::nextafter(unif(engine), 1.0) ;
                std::sort(times.begin(), times.end());
                bool ok = times[m - 1] - times[0] < spec.window && times[0] > 0.0;
                for (int j = 1; ok && j < m; ++j) ok = times[j] > times[j - 1];
                if (ok) break;
                if (attempt > 1000)
                    throw NumericalError("alphalnd_constant: cannot draw admissible times");
            }
            const Eigen::MatrixXd C = increment_covariance(desc, times);
            double dt_part = 0.0;
            for (int j = 0; j < m; ++j) {
                const double dt = times[j] - (j > 0 ? times[j - 1] : 0.0);
                for (int l = 0; l < desc.d; ++l)
                    dt_part += alpha * static_cast<double>(k_matrix(j, l)) * std::log(dt);
            }
            for (int j = 0; j < m; ++j)
                for (int l = 0; l < desc.d; ++l) {
                    const double magr = spec.mag_lo * std::exp(log_ratio * unif(engine));
                    v(j, l) = (unif(engine) < 0.5 ? -1.0 : 1.0) * magr;
                }
            consider(times, C, dt_part);
        }
    }

    const double swept = std::isfinite(best_logw) ? std::exp(best_logw) : 0.0;
    if (have_plain && best_plain >= swept) {
        report.c_empirical = best_plain;
        report.argmax_times.assign(m, 0.0);
        report.argmax_v = Eigen::MatrixXd::Zero(m, desc.d);
    } else {
        report.c_empirical = swept;
        report.argmax_times = best_times;
        report.argmax_v = best_v;
    }
    return report;
}

double berman_lnd_ratio(const ProcessDescriptor& desc, const std::vector<double>& times,
                        const std::vector<double>& v) {
    check_gaussian(desc, "berman_lnd_ratio");
    if (desc.d != 1)
        throw ValidationError("berman_lnd_ratio: scalar (d = 1) descriptors only");
    if (times.size() != v.size())
        throw ValidationError("berman_lnd_ratio: times and v must match");
    const Eigen::MatrixXd C = increment_covariance(desc, times);
    const Eigen::Map<const Eigen::VectorXd> w(v.data(), static_cast<Eigen::Index>(v.size()));
    double den = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) den += v[j] * v[j] * C(j, j);
    if (den == 0.0)
        throw ValidationError("berman_lnd_ratio: zero denominator (v vanishes)");
    return quadratic_form(C, w) / den;
}

std::pair<double, double> variance_bounds_check(
    const ProcessDescriptor& desc, double alpha,
    const std::vector<std::pair<double, double>>& pairs) {
    check_gaussian(desc, "variance_bounds_check");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("variance_bounds_check: alpha must lie in (0,1)");
    if (pairs.empty())
        throw ValidationError("variance_bounds_check: empty pair grid");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& [s, t] : pairs) {
        if (!(s >= 0.0 && t > s))
            throw ValidationError("variance_bounds_check: pairs must satisfy 0 <= s < t");
        const double var =
            covariance(desc, t, t) + covariance(desc, s, s) - 2.0 * covariance(desc, s, t);
        const double ratio = var / std::pow(t - s, 2.0 * alpha);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {lo, hi};
}

}  // namespace besovlab
