#include "besovlab/moments.hpp"

#include <cmath>
#include <set>

#include "besovlab/stats.hpp"

namespace besovlab {

MomentEstimate moment_increment_slope(const std::vector<SamplePath>& paths, double p0,
                                      const std::vector<int>& lags) {
    if (lags.size() < 4)
        throw ValidationError("moment_increment_slope: need >= 4 lags, got " +
                              std::to_string(lags.size()));
    if (std::set<int>(lags.begin(), lags.end()).size() != lags.size())
        throw ValidationError("moment_increment_slope: lags must be distinct");
    if (p0 < 1.0)
        throw ValidationError("moment_increment_slope: p0 must be >= 1");
    if (paths.empty())
        throw ValidationError("moment_increment_slope: no paths");

    const std::size_t n = paths.front().n_points();
    const double dt = paths.front().times[1] - paths.front().times[0];
    std::vector<double> log_dt, log_moment;
    for (int lag : lags) {
        if (lag < 1 || static_cast<std::size_t>(lag) >= n)
            throw ValidationError("moment_increment_slope: lag out of range: " +
                                  std::to_string(lag));
        double sum = 0.0;
        std::size_t count = 0;
        for (const SamplePath& path : paths) {
            if (path.n_points() != n)
                throw ValidationError("moment_increment_slope: paths on mismatched grids");
            for (std::size_t i = 0; i + lag < n; ++i) {
                const double inc = (path.values.row(i + lag) - path.values.row(i)).norm();
                sum += std::pow(inc, p0);
                ++count;
            }
        }
        log_dt.push_back(std::log(dt * static_cast<double>(lag)));
        log_moment.push_back(std::log(sum / static_cast<double>(count)));
    }
    const LineFit fit = least_squares(log_dt, log_moment);
    MomentEstimate est;
    est.p0 = p0;
    est.slope = fit.slope;
    est.K_hat = std::exp(fit.intercept);
    est.lags = lags;
    return est;
}

}  // namespace besovlab
