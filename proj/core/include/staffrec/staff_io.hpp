#pragma once

#include <string>
#include <vector>

#include "staffrec/config.hpp"
#include "staffrec/evaluation.hpp"
#include "staffrec/synth.hpp"
#include "staffrec/tracker.hpp"

namespace staffrec {

/// Contents of a staff geometry file.
struct StavesDocument {
  int rows = 0;
  int cols = 0;
  std::vector<ReconstructedStaff> staves;
};

/// Staff geometry schema:
///   { "image": {"rows", "cols"},
///     "params_echo": { ...algorithm parameters... },
///     "staves": [ { "col_range": [m0, m1], "mean_sep", "thickness",
///                   "lines": [[row per column] x4],
///                   "status_runs": [[[count, code], ...] x4] } ] }
/// Status codes: "D" detected, "E1".."E3" estimated with that many support
/// lines, "X" extrapolated.
void write_staves_json(const StavesDocument& doc, const Config& config, const std::string& path);

/// Parses and validates a staff geometry file; format errors carry the JSON
/// path of the offending field.
StavesDocument read_staves_json(const std::string& path);

/// Reference schema: { "staves": [ { "lines": [[[col, row], ...] x4] } ] }
/// with real-valued coordinates.
void write_gt_json(
    const std::vector<std::array<std::vector<std::pair<double, double>>, 4>>& control_points,
    const std::string& path);

std::vector<std::array<std::vector<std::pair<double, double>>, 4>> read_gt_json(
    const std::string& path);

void write_report_json(const EvalReport& report, const std::string& path);

/// "offset,count" per line, offsets ascending.
void write_separation_csv(const std::map<int, std::uint64_t>& histogram,
                          const std::string& path);

/// Synthesis spec schema:
///   { "pages": [ { "name", "rows", "cols", "n_staves", "line_spacing",
///                  "thickness", "baseline": {"shape": "flat"|"slope"|
///                  "sinusoid", ...}, "gaps": [...], "artifacts": {...},
///                  "seed" } ] }
/// Pages without an explicit seed get base_seed + page index.
std::vector<SynthSpec> read_synth_specs(const std::string& path, std::uint64_t base_seed);

void write_manifest_json(const std::vector<CorpusEntry>& entries, const std::string& path);

}  // namespace staffrec
