#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "staffrec/evaluation.hpp"
#include "staffrec/raster.hpp"

namespace staffrec {

/// Staff baselines: flat, a constant slope (px per column, centered on the
/// page middle), or a sinusoid.
struct FlatShape {};
struct SlopeShape {
  double slope = 0.0;
};
struct SinusoidShape {
  double amplitude = 0.0;
  double period = 1.0;
};
using BaselineShape = std::variant<FlatShape, SlopeShape, SinusoidShape>;

/// Erases the columns [col_start, col_end] of one line (or of all four when
/// line < 0) of one staff.
struct GapSpec {
  int staff = 0;
  int line = -1;
  int col_start = 0;
  int col_end = 0;
};

/// Random clutter: axis-aligned rectangles and discs placed away from the
/// staff bands, with areas sampled from [area_min, area_max].
struct ArtifactSpec {
  int count = 0;
  int area_min = 100;
  int area_max = 400;
};

struct SynthSpec {
  std::string name = "page";
  int rows = 6993;
  int cols = 4414;
  int n_staves = 4;
  double line_spacing = 60.0;
  int thickness = 10;
  BaselineShape baseline = FlatShape{};
  std::vector<GapSpec> gaps;
  ArtifactSpec artifacts;
  std::uint64_t seed = 0;
};

struct SynthPage {
  BinaryRaster image;
  GroundTruth ground_truth;
  /// Control points per staff per line, as written to the reference file.
  std::vector<std::array<std::vector<std::pair<double, double>>, 4>> control_points;
};

/// Center row of line `line` of staff `staff` at column m, before rounding.
double synth_line_center(const SynthSpec& spec, int staff, int line, int m);

/// Deterministic page synthesis: staff bands of the given thickness centered
/// on the analytic baselines, minus the gaps, plus seeded random artifacts.
/// Control points sample the analytic baseline every ceil(cols / 12) columns
/// plus the last column.
SynthPage generate_page(const SynthSpec& spec);

struct CorpusEntry {
  std::string name;
  std::string image_file;
  std::string gt_file;
  std::uint64_t seed = 0;
  std::string spec_hash;
  std::string degradation;  // "clean", "gaps", "artifacts" or "gaps+artifacts"
};

/// Writes <name>.png / <name>.gt.json per spec plus manifest.json; returns
/// the manifest entries.
std::vector<CorpusEntry> generate_corpus(const std::vector<SynthSpec>& specs,
                                         const std::string& out_dir);

/// FNV-1a 64 over a canonical rendering of the spec; stable across runs.
std::string spec_hash(const SynthSpec& spec);

}  // namespace staffrec
