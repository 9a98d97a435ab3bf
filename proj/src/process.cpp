#include "besovlab/process.hpp"

#include <cmath>
#include <sstream>

namespace besovlab {

void SheSpec::validate() const {
    if (nx < 16)
        throw ValidationError("she: nx must be >= 16, got " + std::to_string(nx));
    if (!(x_probe > 0.0 && x_probe < 1.0))
        throw ValidationError("she: x_probe must lie strictly inside (0,1)");
    if (sigma == SigmaKind::ScaledIdentity && rho <= 0.0 && !allow_degenerate_sigma)
        throw ValidationError("she: scaled-identity sigma needs rho > 0 (uniform ellipticity)");
}

double ProcessDescriptor::alpha() const {
    switch (kind) {
        case ProcessKind::Bm: return 0.5;
        case ProcessKind::Fbm: return H;
        case ProcessKind::BifBm: return H * K;
        case ProcessKind::She: return 0.25;
    }
    return 0.0;
}

void ProcessDescriptor::validate() const {
    if (d < 1 || d > 3)
        throw ValidationError("descriptor: d must be in [1,3], got " + std::to_string(d));
    if (kind == ProcessKind::Fbm || kind == ProcessKind::BifBm) {
        if (!(H > 0.0 && H < 1.0))
            throw ValidationError("descriptor: H must lie in (0,1)");
    }
    if (kind == ProcessKind::BifBm) {
        if (!(K > 0.0 && K <= 1.0))
            throw ValidationError("descriptor: K must lie in (0,1]");
    }
    if (kind == ProcessKind::She) she.validate();
}

std::string ProcessDescriptor::label() const {
    std::ostringstream out;
    switch (kind) {
        case ProcessKind::Bm: out << "Bm"; break;
        case ProcessKind::Fbm: out << "Fbm(H=" << H << ")"; break;
        case ProcessKind::BifBm: out << "BifBm(H=" << H << ",K=" << K << ")"; break;
        case ProcessKind::She: out << "She(nx=" << she.nx << ")"; break;
    }
    if (d > 1) out << "^" << d;
    return out.str();
}

double cov_bifbm(double H, double K, double s, double t) {
    if (!(H > 0.0 && H < 1.0))
        throw ValidationError("cov_bifbm: H must lie in (0,1)");
    if (!(K > 0.0 && K <= 1.0))
        throw ValidationError("cov_bifbm: K must lie in (0,1]");
    if (s < 0.0 || t < 0.0)
        throw ValidationError("cov_bifbm: times must be non-negative");
    const double a = std::pow(t, 2.0 * H) + std::pow(s, 2.0 * H);
    const double b = std::pow(std::abs(t - s), 2.0 * H * K);
    return std::exp2(-K) * (std::pow(a, K) - b);
}

double covariance(const ProcessDescriptor& desc, double s, double t) {
    switch (desc.kind) {
        case ProcessKind::Bm: return cov_bifbm(0.5, 1.0, s, t);
        case ProcessKind::Fbm: return cov_bifbm(desc.H, 1.0, s, t);
        case ProcessKind::BifBm: return cov_bifbm(desc.H, desc.K, s, t);
        case ProcessKind::She:
            throw UnsupportedError("covariance: no closed form for She");
    }
    throw ValidationError("covariance: unknown process kind");
}

std::string to_string(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::Bm: return "Bm";
        case ProcessKind::Fbm: return "Fbm";
        case ProcessKind::BifBm: return "BifBm";
        case ProcessKind::She: return "She";
    }
    return "?";
}

std::string to_string(SigmaKind kind) {
    switch (kind) {
        case SigmaKind::Identity: return "identity";
        case SigmaKind::ScaledIdentity: return "scaled-identity";
        case SigmaKind::Tanh: return "tanh";
    }
    return "?";
}

std::string to_string(DriftKind kind) {
    switch (kind) {
        case DriftKind::Zero: return "zero";
        case DriftKind::Tanh: return "tanh";
    }
    return "?";
}

ProcessKind process_kind_from_string(const std::string& s) {
    if (s == "Bm" || s == "bm") return ProcessKind::Bm;
    if (s == "Fbm" || s == "fbm") return ProcessKind::Fbm;
    if (s == "BifBm" || s == "bifbm") return ProcessKind::BifBm;
    if (s == "She" || s == "she") return ProcessKind::She;
    throw ValidationError("unknown process kind '" + s + "'");
}

SigmaKind sigma_kind_from_string(const std::string& s) {
    if (s == "identity") return SigmaKind::Identity;
    if (s == "scaled-identity") return SigmaKind::ScaledIdentity;
    if (s == "tanh") return SigmaKind::Tanh;
    throw ValidationError("unknown sigma builtin '" + s + "'");
}

DriftKind drift_kind_from_string(const std::string& s) {
    if (s == "zero") return DriftKind::Zero;
    if (s == "tanh") return DriftKind::Tanh;
    throw ValidationError("unknown drift builtin '" + s + "'");
}

}  // namespace besovlab
