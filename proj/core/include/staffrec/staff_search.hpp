#pragma once

#include <array>
#include <optional>
#include <vector>

#include "staffrec/raster.hpp"

namespace staffrec {

struct SearchParams {
  int n_stripes = 16;
  int ma_length = 11;           // moving-average length, odd
  double threshold_frac = 0.4;  // of the stripe width, in columns
  int sep_min = 20;             // admissible line separation range, px
  int sep_max = 100;
  double spacing_tol = 0.20;    // allowed relative deviation between separations
};

/// Per-row foreground counts over one vertical stripe [col_start, col_end).
struct Projection {
  std::vector<double> values;
  int col_start = 0;
  int col_end = 0;

  int stripe_width() const { return col_end - col_start; }
};

/// Four candidate line rows in a stripe with their separations.
struct StaffHypothesis {
  std::array<int, 4> peak_rows{};
  std::array<double, 3> deltas{};
  double mean_sep = 0.0;  // (d1 + d2 + d3) / 3
  int col_start = 0;      // stripe that produced the hypothesis
  int col_end = 0;
};

Projection y_projection(const BinaryRaster& image, int col_start, int col_end);

/// Centered moving average of odd length with zero padding at both ends.
Projection smooth_projection(const Projection& proj, int ma_length);

/// Zeroes every value not strictly above frac * stripe_width.
Projection threshold_projection(const Projection& proj, int stripe_width, double frac);

/// Strict local maxima of the thresholded projection, plateaus resolving to
/// their center row (lower row on even plateaus). Candidates are accepted
/// greedily in decreasing height order (ties to the lower row); anything
/// closer than min_sep rows to an accepted maximum is dropped. Rows with
/// value 0 are never returned. Result is sorted ascending.
std::vector<int> local_maxima(const Projection& proj, int min_sep);

/// First window of four consecutive maxima whose separations all lie in
/// [sep_min, sep_max] and deviate from the mean of the other two by at most
/// spacing_tol, scanning top to bottom.
std::optional<StaffHypothesis> find_tetragram(const std::vector<int>& maxima,
                                              const SearchParams& params);

struct SearchResult {
  StaffHypothesis hypothesis;
  int stripe_index = 0;
};

/// Runs the projection chain stripe by stripe, left to right, and returns the
/// first stripe's hypothesis; nothing when every stripe fails.
std::optional<SearchResult> search_staff(const BinaryRaster& image, const SearchParams& params);

/// Column interval [start, end) of stripe s under the fixed partition
/// (floor(cols / n_stripes) wide, last stripe absorbing the remainder).
std::pair<int, int> stripe_bounds(int cols, int n_stripes, int s);

}  // namespace staffrec
