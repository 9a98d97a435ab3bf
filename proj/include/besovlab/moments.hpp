#pragma once

#include <vector>

#include "besovlab/sampling.hpp"

namespace besovlab {

struct MomentEstimate {
    double p0 = 2.0;
    double slope = 0.0;   // fitted exponent of log E||dX||^p0 vs log dt
    double K_hat = 0.0;   // exp(intercept)
    std::vector<int> lags;
};

// Least-squares fit of log mean ||X_{t+L} - X_t||^p0 against log(L dt) over
// the supplied index lags (>= 4 of them, pooled across paths and times).
MomentEstimate moment_increment_slope(const std::vector<SamplePath>& paths, double p0,
                                      const std::vector<int>& lags);

}  // namespace besovlab
