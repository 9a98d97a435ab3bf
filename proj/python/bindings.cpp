#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "besovlab/besov.hpp"
#include "besovlab/experiment.hpp"
#include "besovlab/lnd.hpp"
#include "besovlab/local_time.hpp"
#include "besovlab/process.hpp"
#include "besovlab/report.hpp"
#include "besovlab/sampling.hpp"
#include "besovlab/she.hpp"
#include "besovlab/version.hpp"

namespace py = pybind11;
using namespace besovlab;

namespace {

ProcessDescriptor make_desc(const std::string& kind, double H, double K, int d, int nx,
                            double x_probe) {
    ProcessDescriptor desc;
    desc.kind = process_kind_from_string(kind);
    desc.H = H;
    desc.K = K;
    desc.d = d;
    desc.she.nx = nx;
    desc.she.x_probe = x_probe;
    desc.validate();
    return desc;
}

py::dict path_to_dict(const SamplePath& path) {
    py::dict out;
    out["times"] = path.times;
    out["values"] = path.values;
    out["covariance_fallback"] = path.covariance_fallback;
    return out;
}

SamplePath path_from_values(const Eigen::MatrixXd& values, double t_max) {
    SamplePath path;
    path.descriptor.kind = ProcessKind::Bm;
    path.descriptor.d = static_cast<int>(values.cols());
    GridSpec grid{static_cast<std::size_t>(values.rows()), t_max};
    grid.validate();
    path.times = grid.times();
    path.values = values;
    return path;
}

py::dict verdict_to_dict(const RegularityVerdict& v) {
    py::dict out;
    out["nu_hat"] = v.nu_hat;
    out["slope"] = v.slope;
    out["bounded"] = v.bounded;
    out["blows_up"] = v.blows_up;
    out["little_besov"] = v.little_besov;
    out["tau"] = v.tau;
    return out;
}

}  // namespace

PYBIND11_MODULE(_besovlab, m) {
    m.doc() = "Dyadic Besov regularity statistics for simulated stochastic processes";
    m.attr("__version__") = kVersion;

    m.def("cov_bifbm", &cov_bifbm, py::arg("H"), py::arg("K"), py::arg("s"), py::arg("t"),
          "Bifractional Brownian covariance 2^-K ((t^2H + s^2H)^K - |t-s|^2HK)");

    m.def(
        "sample_path",
        [](const std::string& kind, double H, double K, int d, std::size_t n_points, double t_max,
           std::uint64_t seed, std::uint64_t replicate, const std::string& sampler, int nx,
           double x_probe) {
            const ProcessDescriptor desc = make_desc(kind, H, K, d, nx, x_probe);
            GridSpec grid{n_points, t_max};
            grid.validate();
            if (desc.kind == ProcessKind::She)
                return path_to_dict(solve_she(desc, grid, seed, replicate));
            SamplerMode mode = SamplerMode::Auto;
            if (sampler == "exact") mode = SamplerMode::Exact;
            else if (sampler == "circulant") mode = SamplerMode::Circulant;
            else if (sampler != "auto")
                throw ValidationError("sample_path: sampler must be auto|exact|circulant");
            PathSampler ps(desc, grid, mode);
            return path_to_dict(ps.draw(seed, replicate));
        },
        py::arg("kind"), py::arg("H") = 0.5, py::arg("K") = 1.0, py::arg("d") = 1,
        py::arg("n_points") = 1025, py::arg("t_max") = 1.0, py::arg("seed") = 0,
        py::arg("replicate") = 0, py::arg("sampler") = "auto", py::arg("nx") = 128,
        py::arg("x_probe") = 0.5);

    m.def(
        "modulus_lp",
        [](const Eigen::MatrixXd& values, double p, double t) { return modulus_lp(values, p, t); },
        py::arg("values"), py::arg("p"), py::arg("t"));

    m.def(
        "dyadic_profile",
        [](const Eigen::MatrixXd& values, double p, int J_max) {
            return dyadic_profile(values, p, J_max).A;
        },
        py::arg("values"), py::arg("p"), py::arg("J_max"));

    m.def(
        "classify",
        [](const Eigen::MatrixXd& values, double p, int J_max, double nu, double tau) {
            const DyadicProfile prof = dyadic_profile(values, p, J_max);
            return verdict_to_dict(classify_regularity(prof, nu, tau));
        },
        py::arg("values"), py::arg("p"), py::arg("J_max"), py::arg("nu"), py::arg("tau") = 0.1);

    m.def(
        "estimate_exponent",
        [](const Eigen::MatrixXd& values, double p, int J_max) {
            return estimate_exponent(dyadic_profile(values, p, J_max));
        },
        py::arg("values"), py::arg("p"), py::arg("J_max"));

    m.def(
        "localtime_profile",
        [](const Eigen::MatrixXd& values, double t_max, double bin_width, double q, double nu,
           int J_max) {
            const SamplePath path = path_from_values(values, t_max);
            const double width = bin_width > 0.0 ? bin_width : default_bin_width(path);
            const LocalTimeField field = local_time_field(path, width);
            const DyadicProfile prof = uniform_localtime_statistic(field, q, nu, J_max);
            py::dict out;
            out["A"] = prof.A;
            out["S"] = prof.S;
            out["S_direct"] = prof.S_direct;
            out["bin_width"] = width;
            return out;
        },
        py::arg("values"), py::arg("t_max") = 1.0, py::arg("bin_width") = 0.0, py::arg("q") = 1.0,
        py::arg("nu") = 0.5, py::arg("J_max") = 6);

    m.def(
        "gaussian_charfn",
        [](const std::string& kind, double H, double K, int d, const std::vector<double>& times,
           const Eigen::MatrixXd& v, double alpha) {
            const ProcessDescriptor desc = make_desc(kind, H, K, d, 128, 0.5);
            CharFnQuery query;
            query.times = times;
            query.v = v;
            query.k = Eigen::MatrixXi::Zero(v.rows(), v.cols());
            query.alpha = alpha;
            return gaussian_charfn(query, desc);
        },
        py::arg("kind"), py::arg("H"), py::arg("K"), py::arg("d"), py::arg("times"), py::arg("v"),
        py::arg("alpha") = 0.5);

    m.def(
        "berman_lnd_ratio",
        [](const std::string& kind, double H, double K, const std::vector<double>& times,
           const std::vector<double>& v) {
            return berman_lnd_ratio(make_desc(kind, H, K, 1, 128, 0.5), times, v);
        },
        py::arg("kind"), py::arg("H"), py::arg("K"), py::arg("times"), py::arg("v"));

    m.def(
        "variance_bounds",
        [](const std::string& kind, double H, double K, double alpha,
           const std::vector<std::pair<double, double>>& pairs) {
            return variance_bounds_check(make_desc(kind, H, K, 1, 128, 0.5), alpha, pairs);
        },
        py::arg("kind"), py::arg("H"), py::arg("K"), py::arg("alpha"), py::arg("pairs"));

    m.def(
        "grr_check",
        [](const std::vector<double>& g, double p, double nu, double beta) {
            const GrrCase c = grr_check(g, p, nu, beta);
            py::dict out;
            out["B"] = c.B;
            out["violations"] = c.violations;
            out["max_ratio"] = c.max_ratio;
            return out;
        },
        py::arg("g"), py::arg("p"), py::arg("nu"), py::arg("beta"));

    m.def(
        "run_experiment_json",
        [](const std::string& config_json, const std::string& out_dir) {
            const ExperimentConfig cfg = config_from_json(nlohmann::json::parse(config_json));
            const ReportBundle bundle = run_experiment(cfg);
            if (!out_dir.empty()) emit_report(bundle, out_dir);
            nlohmann::json out;
            out["config_hash"] = bundle.hash;
            out["version"] = bundle.version;
            nlohmann::json aggs = nlohmann::json::object();
            for (const auto& [name, s] : bundle.aggregates)
                aggs[name] = {{"mean", s.mean}, {"se", s.se}, {"min", s.min},
                              {"max", s.max},   {"n", s.n}};
            out["aggregates"] = aggs;
            out["covariance_fallback_count"] = bundle.covariance_fallback_count;
            return out.dump();
        },
        py::arg("config_json"), py::arg("out_dir") = "");

    py::register_exception<ValidationError>(m, "BesovlabValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "BesovlabNumericalError", PyExc_ArithmeticError);
}
