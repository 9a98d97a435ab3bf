#pragma once

#include <string>

#include "besovlab/errors.hpp"

namespace besovlab {

enum class ProcessKind { Bm, Fbm, BifBm, She };

enum class SigmaKind { Identity, ScaledIdentity, Tanh };
enum class DriftKind { Zero, Tanh };

struct SheSpec {
    SigmaKind sigma = SigmaKind::Identity;
    double rho = 1.0;  // gain of ScaledIdentity
    DriftKind b = DriftKind::Zero;
    int nx = 128;
    double x_probe = 0.5;
    bool allow_degenerate_sigma = false;  // test hook: lets rho == 0 through

    void validate() const;
};

struct ProcessDescriptor {
    ProcessKind kind = ProcessKind::Bm;
    int d = 1;
    double H = 0.5;  // Fbm / BifBm
    double K = 1.0;  // BifBm
    SheSpec she;

    bool gaussian() const { return kind != ProcessKind::She; }
    double alpha() const;
    void validate() const;
    std::string label() const;
};

// 2^-K ((t^2H + s^2H)^K - |t-s|^2HK); K = 1 is fractional Brownian motion,
// (H, K) = (1/2, 1) is Brownian motion.
double cov_bifbm(double H, double K, double s, double t);

// Covariance of one scalar coordinate of a Gaussian descriptor.
double covariance(const ProcessDescriptor& desc, double s, double t);

std::string to_string(ProcessKind kind);
std::string to_string(SigmaKind kind);
std::string to_string(DriftKind kind);
ProcessKind process_kind_from_string(const std::string& s);
SigmaKind sigma_kind_from_string(const std::string& s);
DriftKind drift_kind_from_string(const std::string& s);

}  // namespace besovlab
