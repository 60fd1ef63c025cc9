#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "staffrec/raster.hpp"

namespace staffrec {

/// Cleanup parameters. The structuring element for the closing step is a
/// disc whose area matches min_area: radius = round(sqrt(min_area / pi)),
/// disc = all offsets with dx^2 + dy^2 <= radius^2. min_area 500 gives
/// radius 13.
struct PreprocessParams {
  int min_area = 500;

  int disc_radius() const;
};

/// 8-connected component labeling. Label 0 is background; foreground labels
/// start at 1 and are assigned in row-major first-encounter order.
/// areas[k] is the pixel count of label k (areas[0] == 0).
struct ComponentLabeling {
  int rows = 0;
  int cols = 0;
  std::vector<std::int32_t> labels;
  std::vector<std::size_t> areas;

  int label_count() const { return static_cast<int>(areas.size()) - 1; }
  std::int32_t label_at(int r, int c) const {
    return labels[static_cast<std::size_t>(r) * cols + c];
  }
};

std::array<std::uint64_t, 256> gray_histogram(const GrayRaster& image);

/// Threshold maximizing between-class variance over a 256-bin histogram.
/// Ties resolve to the lowest threshold; returns -1 when no split produces
/// two nonempty classes (constant or empty histogram).
int otsu_threshold(const std::array<std::uint64_t, 256>& hist);

/// Pixels strictly above the Otsu threshold become foreground. A constant
/// image yields all background.
BinaryRaster otsu_binarize(const GrayRaster& image);

ComponentLabeling label_components(const BinaryRaster& image);

/// Keeps exactly the 8-connected components with area strictly greater
/// than min_area.
BinaryRaster area_open(const BinaryRaster& image, int min_area);

BinaryRaster dilate_disc(const BinaryRaster& image, int radius);

/// Erosion counterpart; out-of-bounds neighborhoods count as foreground so
/// closing stays extensive at the borders.
BinaryRaster erode_disc(const BinaryRaster& image, int radius);

BinaryRaster close_disc(const BinaryRaster& image, const PreprocessParams& params);

/// Otsu binarization, area opening, disc closing — in that order.
BinaryRaster preprocess(const GrayRaster& image, const PreprocessParams& params);

}  // namespace staffrec
