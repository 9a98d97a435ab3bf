#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "besovlab/errors.hpp"

namespace besovlab {

// Uniform grid on [0, t_max] with 2^J + 1 points, so every dyadic cut point
// k * 2^-j * t_max with j <= J lands exactly on a grid node.
struct GridSpec {
    std::size_t n_points = 1025;
    double t_max = 1.0;

    // J such that n_points == 2^J + 1, or -1 if n_points has the wrong shape.
    int levels() const {
        std::size_t m = n_points - 1;
        if (n_points < 2) return -1;
        int j = 0;
        while (m > 1 && (m & 1) == 0) {
            m >>= 1;
            ++j;
        }
        return m == 1 ? j : -1;
    }

    double spacing() const { return t_max / static_cast<double>(n_points - 1); }

    void validate() const {
        if (levels() < 3)
            throw ValidationError("grid: n_points must be 2^J + 1 with J >= 3, got " +
                                  std::to_string(n_points));
        if (!(t_max > 0.0))
            throw ValidationError("grid: t_max must be positive");
    }

    std::vector<double> times() const {
        std::vector<double> t(n_points);
        for (std::size_t i = 0; i < n_points; ++i)
            t[i] = t_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
        return t;
    }
};

}  // namespace besovlab
