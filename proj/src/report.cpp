#include "besovlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace besovlab {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::ofstream open_out(const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("I/O error: cannot write " + file.string());
    return out;
}

std::uint64_t file_checksum(const fs::path& file, std::uint64_t* bytes) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("I/O error: cannot read back " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    *bytes = data.size();
    return fnv1a64(data);
}

struct Series {
    std::vector<double> xs, ys;
};

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Minimal line chart: gray polyline per replicate, heavy mean polyline, integer
// x ticks, ~5 y ticks.
void write_svg(const fs::path& file, const std::string& title, const std::string& y_label,
               const std::vector<Series>& series, const Series& mean_series) {
    const double W = 640, Hg = 440, ml = 64, mr = 18, mt = 30, mb = 48;
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const Series& s : series)
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            x_lo = std::min(x_lo, s.xs[i]);
            x_hi = std::max(x_hi, s.xs[i]);
            y_lo = std::min(y_lo, s.ys[i]);
            y_hi = std::max(y_hi, s.ys[i]);
        }
    if (!(x_lo < x_hi)) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if (!(y_lo < y_hi)) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;
    auto X = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (W - ml - mr); };
    auto Y = [&](double y) { return Hg - mb - (y - y_lo) / (y_hi - y_lo) * (Hg - mt - mb); };

    std::ofstream out = open_out(file);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hg
        << "\" viewBox=\"0 0 " << W << " " << Hg << "\">\n"
        << "<rect width=\"" << W << "\" height=\"" << Hg << "\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"14\">" << title << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << Hg - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << Hg - mb << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << Hg - mb
        << "\" stroke=\"black\"/>\n";
    for (int j = static_cast<int>(std::ceil(x_lo)); j <= static_cast<int>(std::floor(x_hi)); ++j) {
        const double px = X(j);
        out << "<line x1=\"" << svg_num(px) << "\" y1=\"" << Hg - mb << "\" x2=\"" << svg_num(px)
            << "\" y2=\"" << Hg - mb + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << svg_num(px) << "\" y=\"" << Hg - mb + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << j
            << "</text>\n";
    }
    const double y_step_raw = (y_hi - y_lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(y_step_raw)));
    double y_step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (mag * m >= y_step_raw) {
            y_step = mag * m;
            break;
        }
    for (double ty = std::ceil(y_lo / y_step) * y_step; ty <= y_hi + 1e-12; ty += y_step) {
        const double py = Y(ty);
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << svg_num(py) << "\" x2=\"" << ml
            << "\" y2=\"" << svg_num(py) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << svg_num(py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << svg_num(ty)
            << "</text>\n";
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << Hg - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">j</text>\n"
        << "<text x=\"16\" y=\"" << (mt + Hg - mb) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\""
        << " transform=\"rotate(-90 16 " << (mt + Hg - mb) / 2 << ")\">" << y_label
        << "</text>\n";
    auto polyline = [&](const Series& s, const char* style) {
        if (s.xs.empty()) return;
        out << "<polyline fill=\"none\" " << style << " points=\"";
        for (std::size_t i = 0; i < s.xs.size(); ++i)
            out << svg_num(X(s.xs[i])) << "," << svg_num(Y(s.ys[i])) << " ";
        out << "\"/>\n";
    };
    for (const Series& s : series)
        polyline(s, "stroke=\"#9a9a9a\" stroke-width=\"1\" opacity=\"0.7\"");
    polyline(mean_series, "stroke=\"#1f77b4\" stroke-width=\"2.5\"");
    out << "</svg>\n";
}

}  // namespace

FileManifest emit_report(const ReportBundle& bundle, const std::string& out_dir) {
    if (bundle.profiles.empty() && bundle.verdicts.empty())
        throw ValidationError("emit_report: empty bundle");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("I/O error: cannot create directory " + out_dir);

    FileManifest manifest;
    manifest.directory = out_dir;
    std::vector<std::string> written;

    std::vector<std::string> stat_ids;
    bool any_S = false;
    for (const ProfileRecord& rec : bundle.profiles) {
        if (std::find(stat_ids.begin(), stat_ids.end(), rec.statistic) == stat_ids.end())
            stat_ids.push_back(rec.statistic);
        any_S = any_S || !rec.S.empty();
    }

    {
        std::ofstream out = open_out(fs::path(out_dir) / "profiles.csv");
        const bool tag = stat_ids.size() > 1;
        out << (tag ? "statistic,replicate,j,A_j" : "replicate,j,A_j");
        if (any_S) out << ",S_j";
        out << "\n";
        for (const ProfileRecord& rec : bundle.profiles)
            for (std::size_t j = 0; j < rec.A.size(); ++j) {
                if (tag) out << rec.statistic << ",";
                out << rec.replicate << "," << j << "," << format_full(rec.A[j]);
                if (any_S) {
                    out << ",";
                    if (j < rec.S.size()) out << format_full(rec.S[j]);
                }
                out << "\n";
            }
        written.push_back("profiles.csv");
    }

    {
        json arr = json::array();
        for (const VerdictRecord& v : bundle.verdicts) {
            json e;
            e["statistic"] = v.statistic;
            e["replicate"] = v.replicate;
            e["nu"] = v.nu;
            e["nu_hat"] = v.verdict.nu_hat;
            e["slope"] = v.verdict.slope;
            e["bounded"] = v.verdict.bounded;
            e["blows_up"] = v.verdict.blows_up;
            e["little_besov"] = v.verdict.little_besov;
            e["tau"] = v.verdict.tau;
            arr.push_back(e);
        }
        std::ofstream out = open_out(fs::path(out_dir) / "verdicts.json");
        out << arr.dump(2) << "\n";
        written.push_back("verdicts.json");
    }

    {
        json agg;
        agg["version"] = bundle.version;
        agg["config_hash"] = hex64(bundle.hash);
        agg["seed"] = bundle.config.seed;
        agg["n_replicates"] = bundle.config.n_replicates;
        agg["config"] = canonical_json(bundle.config);
        json stats = json::object();
        for (const auto& [name, s] : bundle.aggregates)
            stats[name] = {{"mean", s.mean}, {"se", s.se}, {"min", s.min},
                           {"max", s.max},   {"n", s.n}};
        agg["aggregates"] = stats;
        agg["covariance_fallback_count"] = bundle.covariance_fallback_count;
        agg["lnd"] = bundle.lnd;
        std::ofstream out = open_out(fs::path(out_dir) / "aggregate.json");
        out << agg.dump(2) << "\n";
        written.push_back("aggregate.json");
    }

    for (const std::string& id : stat_ids) {
        std::vector<Series> series;
        Series mean_series;
        std::vector<double> sum_y;
        std::vector<int> count_y;
        bool use_S = false;
        for (const ProfileRecord& rec : bundle.profiles) {
            if (rec.statistic != id) continue;
            use_S = !rec.S.empty();
            const std::vector<double>& vals = use_S ? rec.S : rec.A;
            Series s;
            for (std::size_t j = 0; j < vals.size(); ++j) {
                if (!(vals[j] > 0.0)) continue;
                const double y = std::log2(vals[j]);
                s.xs.push_back(static_cast<double>(j));
                s.ys.push_back(y);
                if (sum_y.size() <= j) {
                    sum_y.resize(j + 1, 0.0);
                    count_y.resize(j + 1, 0);
                }
                sum_y[j] += y;
                ++count_y[j];
            }
            series.push_back(std::move(s));
        }
        for (std::size_t j = 0; j < sum_y.size(); ++j)
            if (count_y[j] == static_cast<int>(series.size()) && count_y[j] > 0) {
                mean_series.xs.push_back(static_cast<double>(j));
                mean_series.ys.push_back(sum_y[j] / count_y[j]);
            }
        const std::string name = "profile_" + id + ".svg";
        write_svg(fs::path(out_dir) / name, id, use_S ? "log2 S_j" : "log2 A_j", series,
                  mean_series);
        written.push_back(name);
    }

    for (const std::string& name : written) {
        ManifestEntry entry;
        entry.name = name;
        entry.checksum = file_checksum(fs::path(out_dir) / name, &entry.bytes);
        manifest.files.push_back(entry);
    }
    json m;
    m["directory"] = out_dir;
    json files = json::array();
    for (const ManifestEntry& e : manifest.files)
        files.push_back({{"name", e.name}, {"bytes", e.bytes}, {"fnv1a64", hex64(e.checksum)}});
    m["files"] = files;
    std::ofstream out = open_out(fs::path(out_dir) / "manifest.json");
    out << m.dump(2) << "\n";
    return manifest;
}

void write_path_csv(const SamplePath& path, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "t";
    for (int l = 0; l < path.d(); ++l) out << ",x" << l + 1;
    out << "\n";
    for (std::size_t i = 0; i < path.n_points(); ++i) {
        out << format_full(path.times[i]);
        for (int l = 0; l < path.d(); ++l)
            out << "," << format_full(path.values(static_cast<Eigen::Index>(i), l));
        out << "\n";
    }
}

void write_field_csv(const LocalTimeField& field, const std::string& file, std::size_t t_stride) {
    if (t_stride == 0) t_stride = 1;
    std::ofstream out = open_out(file);
    const int d = field.bins.d();
    for (int l = 0; l < d; ++l) out << (l ? "," : "") << "x" << l + 1;
    std::vector<std::size_t> cols;
    for (std::size_t ti = 0; ti < field.n_times(); ti += t_stride) cols.push_back(ti);
    if (cols.back() != field.n_times() - 1) cols.push_back(field.n_times() - 1);
    for (std::size_t ti : cols) out << ",t=" << format_full(field.t_grid[ti]);
    out << "\n";
    for (std::size_t bin = 0; bin < field.n_bins_total; ++bin) {
        const std::vector<double> center = field.bin_center(bin);
        for (int l = 0; l < d; ++l) out << (l ? "," : "") << format_full(center[l]);
        for (std::size_t ti : cols) out << "," << format_full(field.value(ti, bin));
        out << "\n";
    }
}

}  // namespace besovlab
