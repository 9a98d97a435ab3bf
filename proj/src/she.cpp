#include "besovlab/she.hpp"

#include <cmath>
#include <vector>

#include "besovlab/rng.hpp"

namespace besovlab {

namespace {

double sigma_gain(const SheSpec& spec, double u_k) {
    switch (spec.sigma) {
        case SigmaKind::Identity: return 1.0;
        case SigmaKind::ScaledIdentity: return spec.rho;
        case SigmaKind::Tanh: return 1.0 + 0.5 * std::tanh(u_k);
    }
    return 0.0;
}

double drift(const SheSpec& spec, double u_k) {
    switch (spec.b) {
        case DriftKind::Zero: return 0.0;
        case DriftKind::Tanh: return 0.5 * std::tanh(u_k);
    }
    return 0.0;
}

}  // namespace

void check_she_coefficients(const SheSpec& spec) {
    // The built-in families are diagonal, so ellipticity reduces to a lower
    // bound on the scalar gain over a spread of state values.
    double lo = 1e300, hi = 0.0, bmax = 0.0;
    for (int i = 0; i <= 48; ++i) {
        const double u = -6.0 + 0.25 * i;
        const double g = std::abs(sigma_gain(spec, u));
        lo = std::min(lo, g);
        hi = std::max(hi, g);
        bmax = std::max(bmax, std::abs(drift(spec, u)));
    }
    if (!(hi < 1e6) || !(bmax < 1e6))
        throw ValidationError("she: coefficient family unbounded on the sample grid");
    if (lo < 1e-12 && !spec.allow_degenerate_sigma)
        throw ValidationError("she: sigma is not uniformly elliptic on the sample grid");
}

SamplePath solve_she(const ProcessDescriptor& desc, const GridSpec& grid, std::uint64_t seed,
                     std::uint64_t replicate) {
    if (desc.kind != ProcessKind::She)
        throw ValidationError("solve_she: descriptor kind must be She");
    desc.validate();
    grid.validate();
    check_she_coefficients(desc.she);

    const SheSpec& spec = desc.she;
    const int d = desc.d;
    const int nx = spec.nx;
    const double dx = 1.0 / static_cast<double>(nx);
    const double dt_req = grid.spacing();
    // dx^2/2 is the explicit-scheme stability edge; stay at half of it so the
    // top spatial mode is not variance-inflated.
    const int n_sub = static_cast<int>(std::ceil(dt_req / (0.25 * dx * dx)));
    const double dt = dt_req / static_cast<double>(n_sub);
    const double r = dt / (dx * dx);
    const double noise_sd = std::sqrt(dt / dx);

    int probe = static_cast<int>(std::lround(spec.x_probe * nx));
    probe = std::max(0, std::min(nx, probe));

    SamplePath path;
    path.times = grid.times();
    path.seed = seed;
    path.replicate = replicate;
    path.descriptor = desc;
    path.descriptor.she.x_probe = dx * static_cast<double>(probe);
    path.values = Eigen::MatrixXd::Zero(grid.n_points, d);

    // u[k][i], nodes i = 0..nx; one noise stream per component field.
    std::vector<std::vector<double>> u(d, std::vector<double>(nx + 1, 0.0));
    std::vector<std::vector<double>> unew(d, std::vector<double>(nx + 1, 0.0));
    std::vector<GaussianStream> noise;
    noise.reserve(d);
    for (int l = 0; l < d; ++l)
        noise.emplace_back(seed, replicate, static_cast<std::uint64_t>(l));

    std::size_t step_index = 0;
    for (std::size_t step = 1; step < grid.n_points; ++step) {
        for (int sub = 0; sub < n_sub; ++sub) {
            ++step_index;
            for (int k = 0; k < d; ++k) {
                const std::vector<double>& uk = u[k];
                std::vector<double>& nk = unew[k];
                GaussianStream& g = noise[k];
                for (int i = 0; i <= nx; ++i) {
                    const double left = (i == 0) ? uk[1] : uk[i - 1];
                    const double right = (i == nx) ? uk[nx - 1] : uk[i + 1];
                    const double lap = left - 2.0 * uk[i] + right;
                    nk[i] = uk[i] + r * lap + dt * drift(spec, uk[i]) +
                            sigma_gain(spec, uk[i]) * noise_sd * g();
                }
            }
            u.swap(unew);
        }
        for (int k = 0; k < d; ++k) {
            const double v = u[k][probe];
            if (!std::isfinite(v))
                throw NumericalError("solve_she: non-finite field value at internal step " +
                                     std::to_string(step_index));
            path.values(step, k) = v;
        }
    }
    return path;
}

double she_linear_variance(double t, double x, int n_modes) {
    double var = t;
    for (int n = 1; n <= n_modes; ++n) {
        const double lam = 2.0 * static_cast<double>(n) * static_cast<double>(n) * M_PI * M_PI;
        const double c = std::cos(static_cast<double>(n) * M_PI * x);
        var += 2.0 * c * c * (1.0 - std::exp(-lam * t)) / lam;
    }
    return var;
}

}  // namespace besovlab
