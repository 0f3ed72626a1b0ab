#pragma once

#include <string>
#include <vector>

#include "relent/experiments.hpp"

namespace relent {

struct ManifestEntry {
    std::string path;
    std::string hash;  // fnv1a-64 of the file content, hex
};

struct Manifest {
    std::vector<ManifestEntry> entries;
};

/// FNV-1a 64-bit of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Serializes one row-major table as CSV: header row, then %.17g numerics
/// (shortest-round-trip safe).
std::string to_csv(const Series& series);

/// Report body as canonical JSON (sorted keys, no timestamps). Reruns with
/// identical inputs produce byte-identical bodies.
std::string report_body_json(const ExperimentReport& report, const std::string& config_echo_json);

/// Writes report.json ({"meta": {...timestamp...}, "body": {...}}), one CSV
/// per series, one plot script per figure, and manifest.json; returns the
/// manifest. Throws Error when the directory cannot be written.
Manifest emit_outputs(const ExperimentReport& report, const std::string& config_echo_json,
                      const std::string& outdir);

}  // namespace relent
