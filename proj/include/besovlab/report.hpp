#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "besovlab/experiment.hpp"
#include "besovlab/local_time.hpp"
#include "besovlab/sampling.hpp"

namespace besovlab {

std::uint64_t fnv1a64(std::string_view bytes);

// %.17g: shortest text that round-trips a double exactly.
std::string format_full(double x);

struct ManifestEntry {
    std::string name;
    std::uint64_t bytes = 0;
    std::uint64_t checksum = 0;
};

struct FileManifest {
    std::string directory;
    std::vector<ManifestEntry> files;
};

// Writes profiles.csv, verdicts.json, aggregate.json, one SVG per statistic,
// and manifest.json; returns the manifest (which excludes itself).
FileManifest emit_report(const ReportBundle& bundle, const std::string& out_dir);

void write_path_csv(const SamplePath& path, const std::string& file);

// One row per occupied-or-not bin: coordinates of the bin center, then the
// local-time values at every t_stride-th grid time.
void write_field_csv(const LocalTimeField& field, const std::string& file,
                     std::size_t t_stride = 1);

}  // namespace besovlab
