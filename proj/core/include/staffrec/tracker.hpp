#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "staffrec/morphology.hpp"
#include "staffrec/raster.hpp"
#include "staffrec/spline.hpp"
#include "staffrec/staff_search.hpp"

namespace staffrec {

struct TrackerParams {
  double seed_tile_width_frac = 2.0 / 3.0;  // of the mean separation
  int seed_tile_height = 3;                 // odd
  double slope_window_frac = 0.5;           // window S = ceil(mean_sep * frac)
  double search_halfwidth_frac = 0.25;      // detection window = ±ceil(mean_sep * frac)
  double removal_margin_frac = 0.5;         // stripe margin = ceil(mean_sep * frac)
};

enum class TrackState : std::uint8_t { Detected, Estimated, Extrapolated };

/// Per-column provenance of a tracked position. support = number of detected
/// lines that drove the estimate (1..3), meaningful for Estimated only.
struct PixelStatus {
  TrackState state = TrackState::Extrapolated;
  std::uint8_t support = 0;

  bool operator==(const PixelStatus&) const = default;
};

enum class TrackDirection { LeftToRight, RightToLeft };

/// Sub-pixel trajectories of the four lines of one staff over
/// [col_start, col_end], with status flags and detected run lengths.
struct TrackedStaff {
  int col_start = 0;
  int col_end = 0;  // inclusive
  std::array<std::vector<double>, 4> lines;
  std::array<std::vector<PixelStatus>, 4> status;
  double mean_sep = 0.0;
  std::vector<int> thickness_samples;

  int width() const { return col_end - col_start + 1; }
  std::size_t detected_count() const;
};

/// Integer-rounded smoothed lines with the estimated ink thickness.
struct ReconstructedStaff {
  int col_start = 0;
  int col_end = 0;  // inclusive
  std::array<std::vector<int>, 4> lines;
  std::array<std::vector<PixelStatus>, 4> status;
  int thickness = 0;
  double mean_sep = 0.0;

  int width() const { return col_end - col_start + 1; }
};

struct Seed {
  int col = 0;
  std::array<double, 4> rows{};
};

/// Scans from the page edge the pass starts at for the first column where a
/// w x h tile centered on every hypothesis row is entirely foreground
/// (w = ceil(seed_tile_width_frac * mean_sep), h = seed_tile_height). Start
/// rows are the centers of the vertical ink runs through the tile centers.
std::optional<Seed> find_seed(const BinaryRaster& image, const StaffHypothesis& hyp,
                              TrackDirection direction, const TrackerParams& params);

/// Column-by-column tracking from the seed to the far page edge. Per column,
/// each line is first looked up as a vertical ink run 8-connected to its
/// previous position; lines that miss are moved by the mean displacement of
/// the detected ones; when nothing is detected all four lines move by the
/// mean of their windowed slopes, which are bookkept as zero from then on so
/// long gaps decay to horizontal. The short span between the seed and the
/// near edge repeats the seed rows so the pass covers the full page width.
TrackedStaff track_direction(const BinaryRaster& image, const Seed& seed, double mean_sep,
                             const TrackerParams& params, TrackDirection direction);

/// Combines the two directional passes: the one with more detected positions
/// is the principal (ties go to the left-to-right pass, so call it as
/// merge_tracks(left_pass, right_pass)); its extrapolated and singly
/// supported positions are replaced by the other pass where that pass
/// detected ink or estimated from at least two lines.
TrackedStaff merge_tracks(const TrackedStaff& a, const TrackedStaff& b);

/// Clears the horizontal stripe [min g1 - margin, max g4 + margin] across the
/// full width, clipped to the raster.
BinaryRaster remove_staff(const BinaryRaster& image, const TrackedStaff& staff,
                          const TrackerParams& params);

/// Draws the reconstructed lines with their estimated thickness on a blank
/// page.
BinaryRaster render_staff_image(int rows, int cols,
                                const std::vector<ReconstructedStaff>& staves);

struct PipelineParams {
  PreprocessParams preprocess;
  SearchParams search;
  TrackerParams tracker;
  SmoothingParams smoothing;
};

/// Full page pipeline: preprocess once, then find-track-smooth-remove until
/// the search comes up empty. Staves are returned in discovery order.
std::vector<ReconstructedStaff> reconstruct_page(const GrayRaster& image,
                                                 const PipelineParams& params);

/// 0/255 grayscale view of a bilevel raster, for feeding binary pages into
/// the pipeline.
GrayRaster to_gray(const BinaryRaster& image);

}  // namespace staffrec
