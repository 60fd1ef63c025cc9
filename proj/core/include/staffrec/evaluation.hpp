#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "staffrec/raster.hpp"
#include "staffrec/tracker.hpp"

namespace staffrec {

/// One reference staff line: the annotated control points and their
/// rasterization (one integer row per integer column of [col_start, col_end]).
struct GroundTruthLine {
  std::vector<std::pair<double, double>> control_points;  // (col, row)
  int col_start = 0;
  int col_end = 0;
  std::vector<int> rows;
};

struct GroundTruthStaff {
  std::array<GroundTruthLine, 4> lines;
};

struct GroundTruth {
  std::vector<GroundTruthStaff> staves;

  std::size_t total_pixels() const;
};

struct EvalParams {
  /// Maximum |row - row| for a reconstructed pixel to validate a reference
  /// pixel in the same column. Derived per image as the rounded mean of the
  /// estimated staff line thicknesses when not set explicitly (0 = derive).
  int vertical_tol = 0;
};

/// The six classification counts plus the signed vertical-separation
/// histogram of matched pixels.
struct EvalCounts {
  std::uint64_t detected = 0;
  std::uint64_t interpolated = 0;
  std::uint64_t missed_detection = 0;
  std::uint64_t missed_interpolation = 0;
  std::uint64_t false_detection = 0;
  std::uint64_t false_interpolation = 0;
  std::map<int, std::uint64_t> separation_histogram;  // recon row - reference row

  std::uint64_t ground_truth_total() const {
    return detected + interpolated + missed_detection + missed_interpolation;
  }
  std::uint64_t staff_line_pixels() const {
    return detected + interpolated + false_detection + false_interpolation;
  }
  std::uint64_t correct_reconstructed() const { return detected + interpolated; }
};

struct EvalReport {
  EvalCounts counts;
  int vertical_tol = 1;
  bool percentages_defined = false;
  // w.r.t. the reference pixel total
  double staff_line_pixels_pct = 0.0;
  double correct_reconstructed_pct = 0.0;
  double detected_pct = 0.0;
  double interpolated_pct = 0.0;
  double missed_detection_pct = 0.0;
  double missed_interpolation_pct = 0.0;
  // w.r.t. the reconstructed pixel total
  double false_detection_pct = 0.0;
  double false_interpolation_pct = 0.0;
};

/// Builds the reference rasterization: an interpolating spline through each
/// line's control points, sampled at every integer column of the control
/// span and rounded.
GroundTruth rasterize_ground_truth(
    const std::vector<std::array<std::vector<std::pair<double, double>>, 4>>& control_points,
    int image_rows, int image_cols);

/// Column-wise classification of reference and reconstructed pixels.
/// Pairs within vertical_tol are matched greedily by ascending |row
/// difference|, one to one. Matched pixels split into detected/interpolated
/// by the binary image at the reference pixel; leftovers become misses
/// (reference side) or false detections/interpolations (reconstruction
/// side, tested at their own coordinate).
EvalCounts classify_pixels(const std::vector<ReconstructedStaff>& recon, const GroundTruth& gt,
                           const BinaryRaster& binary, const EvalParams& params);

/// Effective tolerance for a reconstruction: explicit override, else the
/// rounded mean staff line thickness (at least 1).
int effective_vertical_tol(const std::vector<ReconstructedStaff>& recon,
                           const EvalParams& params);

EvalReport compute_report(const EvalCounts& counts, int vertical_tol);

/// "97.55"-style fixed two-decimal rendering used in report printouts.
std::string format_percent(double value);

}  // namespace staffrec
