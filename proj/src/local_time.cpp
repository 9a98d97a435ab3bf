#include "besovlab/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>

namespace besovlab {

namespace {

constexpr std::size_t kMaxBins = 10'000'000;        // hard cap on n_bins^d
constexpr std::size_t kMaxFieldCells = 400'000'000;  // times x bins memory guard
// Bin width ~ range * n^-(2/(d+2)).  d = 1 is calibrated so the dyadic
// sup-increment statistic of Brownian local time is slope-neutral at nu = 1/2
// (wider bins flatten the window peaks and tilt the regression); d >= 2 backs
// off to the single-step increment scale so bins stay populated.
inline double bin_width_exponent(int d) { return 2.0 / (static_cast<double>(d) + 2.0); }

std::size_t flat_bin(const BinLayout& bins, const double* x) {
    std::size_t flat = 0;
    for (int dim = 0; dim < bins.d(); ++dim) {
        double f = std::floor((x[dim] - bins.origin[dim]) / bins.width);
        long idx = static_cast<long>(f);
        idx = std::max(0L, std::min(static_cast<long>(bins.n_bins[dim]) - 1, idx));
        flat = flat * static_cast<std::size_t>(bins.n_bins[dim]) + static_cast<std::size_t>(idx);
    }
    return flat;
}

}  // namespace

std::vector<double> LocalTimeField::bin_center(std::size_t flat) const {
    std::vector<double> center(bins.d());
    for (int dim = bins.d() - 1; dim >= 0; --dim) {
        const std::size_t nb = static_cast<std::size_t>(bins.n_bins[dim]);
        const std::size_t idx = flat % nb;
        flat /= nb;
        center[dim] = bins.origin[dim] + bins.width * (static_cast<double>(idx) + 0.5);
    }
    return center;
}

std::size_t LocalTimeField::locate_time(double t) const {
    const double tol = 0.5 * dt;
    auto it = std::lower_bound(t_grid.begin(), t_grid.end(), t - tol);
    if (it == t_grid.end() || std::abs(*it - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw ValidationError("local time: t = " + std::to_string(t) +
                              " is not on the field time grid");
    return static_cast<std::size_t>(it - t_grid.begin());
}

double default_bin_width(const SamplePath& path) {
    double range = 0.0;
    for (int l = 0; l < path.d(); ++l)
        range = std::max(range, path.values.col(l).maxCoeff() - path.values.col(l).minCoeff());
    if (range <= 0.0) range = 1.0;
    return range * std::pow(static_cast<double>(path.n_points()), -bin_width_exponent(path.d()));
}

LocalTimeField local_time_field(const SamplePath& path, double bin_width,
                                const BinLayout* layout) {
    if (!(bin_width > 0.0))
        throw ValidationError("local_time_field: bin_width must be positive");
    const std::size_t n = path.n_points();
    const int d = path.d();
    if (n < 2) throw ValidationError("local_time_field: path too short");

    LocalTimeField field;
    field.descriptor = path.descriptor;
    field.t_grid = path.times;
    field.dt = path.times[1] - path.times[0];

    if (layout) {
        if (layout->d() != d || !(layout->width > 0.0))
            throw ValidationError("local_time_field: bad explicit bin layout");
        field.bins = *layout;
    } else {
        field.bins.width = bin_width;
        field.bins.origin.resize(d);
        field.bins.n_bins.resize(d);
        for (int l = 0; l < d; ++l) {
            const double lo = path.values.col(l).minCoeff();
            const double hi = path.values.col(l).maxCoeff();
            field.bins.origin[l] = lo - bin_width;  // one margin bin below
            field.bins.n_bins[l] =
                static_cast<int>(std::ceil((hi - lo) / bin_width)) + 2;
        }
    }
    field.n_bins_total = field.bins.total();
    if (field.n_bins_total > kMaxBins)
        throw ResourceError("local_time_field: " + std::to_string(field.n_bins_total) +
                            " bins exceed the 1e7 budget; increase bin_width");
    if (field.n_bins_total * n > kMaxFieldCells)
        throw ResourceError("local_time_field: field of " +
                            std::to_string(field.n_bins_total * n) + " cells is too large");

    const double dxd = std::pow(field.bins.width, d);
    field.weight = field.dt / dxd;

    field.counts.assign(n * field.n_bins_total, 0);
    std::vector<double> x(d);
    for (std::size_t ti = 1; ti < n; ++ti) {
        std::uint32_t* cur = field.counts.data() + ti * field.n_bins_total;
        const std::uint32_t* prev = cur - field.n_bins_total;
        std::memcpy(cur, prev, field.n_bins_total * sizeof(std::uint32_t));
        for (int l = 0; l < d; ++l) x[l] = path.values(ti - 1, l);
        cur[flat_bin(field.bins, x.data())] += 1;
    }
    return field;
}

TestFn TestFn::coordinate(int axis) {
    TestFn f;
    f.kind = Kind::Coordinate;
    f.axis = axis;
    return f;
}

TestFn TestFn::indicator(double a, double b, int axis) {
    TestFn f;
    f.kind = Kind::Indicator;
    f.a = a;
    f.b = b;
    f.axis = axis;
    return f;
}

TestFn TestFn::gaussian_bump(double center, double width) {
    TestFn f;
    f.kind = Kind::GaussianBump;
    f.center = center;
    f.width = width;
    return f;
}

double TestFn::operator()(const double* x, int d) const {
    switch (kind) {
        case Kind::One:
            return 1.0;
        case Kind::Coordinate:
            return x[axis < d ? axis : 0];
        case Kind::Indicator:
            return (x[axis < d ? axis : 0] >= a && x[axis < d ? axis : 0] < b) ? 1.0 : 0.0;
        case Kind::GaussianBump: {
            double s = 0.0;
            for (int l = 0; l < d; ++l) s += (x[l] - center) * (x[l] - center);
            return std::exp(-0.5 * s / (width * width));
        }
    }
    return 0.0;
}

double occupation_residual(const SamplePath& path, const LocalTimeField& field,
                           const TestFn& fn, double t) {
    const std::size_t ti = field.locate_time(t);
    const int d = path.d();
    std::vector<double> x(d);
    double lhs = 0.0;
    for (std::size_t i = 0; i < ti; ++i) {
        for (int l = 0; l < d; ++l) x[l] = path.values(i, l);
        lhs += field.dt * fn(x.data(), d);
    }
    const double dxd = std::pow(field.bins.width, d);
    const std::uint32_t* row = field.slice(ti);
    double rhs = 0.0;
    for (std::size_t b = 0; b < field.n_bins_total; ++b) {
        if (row[b] == 0) continue;
        const std::vector<double> center = field.bin_center(b);
        rhs += fn(center.data(), d) * field.weight * static_cast<double>(row[b]);
    }
    rhs *= dxd;
    return std::abs(lhs - rhs);
}

double fourier_local_time(const SamplePath& path, const FourierLtQuery& query) {
    const int d = path.d();
    if (d > 2)
        throw UnsupportedError("fourier_local_time: supported only for d <= 2");
    if (query.N < 0.0)
        throw ValidationError("fourier_local_time: N must be >= 0");
    if (static_cast<int>(query.x.size()) != d)
        throw ValidationError("fourier_local_time: evaluation point has wrong dimension");
    const double t_max = path.times.back();
    if (query.t < 0.0 || query.t > t_max * (1.0 + 1e-12))
        throw ValidationError("fourier_local_time: t outside [0, t_max]");
    if (query.N == 0.0) return 0.0;

    const std::size_t n = path.n_points();
    const double dt = path.times[1] - path.times[0];
    std::size_t last = static_cast<std::size_t>(std::floor(query.t / dt + 1e-9));
    last = std::min(last, n - 1);
    if (last == 0) return 0.0;

    // The integrand oscillates in u at rate max|phi - x|; keep at least ~8
    // trapezoid nodes per period (step <= pi / (4 osc)).
    double osc = 0.0;
    for (int l = 0; l < d; ++l) {
        const double lo = path.values.col(l).minCoeff();
        const double hi = path.values.col(l).maxCoeff();
        osc = std::max(osc, std::max(std::abs(lo - query.x[l]), std::abs(hi - query.x[l])));
        osc = std::max(osc, hi - lo);
    }
    osc = std::max(osc, 1.0);
    const std::size_t m_freq =
        static_cast<std::size_t>(std::ceil(2.0 * query.N / (M_PI / (4.0 * osc)))) + 1;
    const double du = 2.0 * query.N / static_cast<double>(m_freq - 1);

    auto inner = [&](const double* u) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i <= last; ++i) {
            double phase = 0.0;
            for (int l = 0; l < d; ++l) phase += u[l] * path.values(i, l);
            const double w = (i == 0 || i == last) ? 0.5 : 1.0;
            acc += w * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        return acc * dt;
    };

    std::complex<double> total(0.0, 0.0);
    if (d == 1) {
        for (std::size_t a = 0; a < m_freq; ++a) {
            const double u = -query.N + du * static_cast<double>(a);
            const double w = (a == 0 || a == m_freq - 1) ? 0.5 : 1.0;
            const std::complex<double> phase(std::cos(u * query.x[0]),
                                             -std::sin(u * query.x[0]));
            total += w * phase * inner(&u);
        }
        total *= du;
    } else {
        for (std::size_t a = 0; a < m_freq; ++a) {
            const double wa = (a == 0 || a == m_freq - 1) ? 0.5 : 1.0;
            for (std::size_t b = 0; b < m_freq; ++b) {
                const double wb = (b == 0 || b == m_freq - 1) ? 0.5 : 1.0;
                double u[2] = {-query.N + du * static_cast<double>(a),
                               -query.N + du * static_cast<double>(b)};
                const double xu = u[0] * query.x[0] + u[1] * query.x[1];
                const std::complex<double> phase(std::cos(xu), -std::sin(xu));
                total += wa * wb * phase * inner(u);
            }
        }
        total *= du * du;
    }
    return total.real() / std::pow(2.0 * M_PI, d);
}

CrossCheckResult localtime_cross_check(const SamplePath& path, double bin_width, double N,
                                       int n_probe) {
    if (path.d() != 1)
        throw ValidationError("localtime_cross_check: d = 1 only");
    if (n_probe < 3)
        throw ValidationError("localtime_cross_check: need >= 3 probes");

    const LocalTimeField field = local_time_field(path, bin_width);
    const std::size_t last = field.n_times() - 1;
    const double lo = path.values.col(0).minCoeff();
    const double hi = path.values.col(0).maxCoeff();
    const double range = hi - lo;

    CrossCheckResult result;
    std::uint32_t max_count = 0;
    const std::uint32_t* row = field.slice(last);
    for (std::size_t b = 0; b < field.n_bins_total; ++b) max_count = std::max(max_count, row[b]);
    result.atomic_suspected =
        static_cast<double>(max_count) > 0.5 * static_cast<double>(path.n_points() - 1);

    for (int k = 1; k <= n_probe; ++k) {
        const double p = lo + range * static_cast<double>(k) / static_cast<double>(n_probe + 1);
        FourierLtQuery query;
        query.N = N;
        query.x = {p};
        query.t = path.times.back();
        const double fourier = fourier_local_time(path, query);
        const std::size_t bin = flat_bin(field.bins, &p);
        const double hist = field.value(last, bin);
        result.max_discrepancy = std::max(result.max_discrepancy, std::abs(hist - fourier));
        result.probes.push_back(p);
    }
    return result;
}

}  // namespace besovlab
