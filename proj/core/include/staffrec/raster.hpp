#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "staffrec/errors.hpp"

namespace staffrec {

/// 8-bit grayscale image, row-major. Row index n runs down the page,
/// column index m runs across it; this convention is shared by every module.
struct GrayRaster {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;

  GrayRaster() = default;
  GrayRaster(int r, int c, std::uint8_t fill = 0)
      : rows(r), cols(c), pixels(static_cast<std::size_t>(r) * c, fill) {
    require(r >= 1 && c >= 1, "GrayRaster dimensions must be positive");
  }

  std::uint8_t at(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * cols + c];
  }
  std::uint8_t& at(int r, int c) {
    return pixels[static_cast<std::size_t>(r) * cols + c];
  }
};

/// Bilevel image. true = foreground = staff ink (white in the source scans),
/// false = background. All morphology and counting assume this polarity.
struct BinaryRaster {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // 0 or 1

  BinaryRaster() = default;
  BinaryRaster(int r, int c, bool fill = false)
      : rows(r), cols(c), pixels(static_cast<std::size_t>(r) * c, fill ? 1 : 0) {
    require(r >= 1 && c >= 1, "BinaryRaster dimensions must be positive");
  }

  bool at(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * cols + c] != 0;
  }
  void set(int r, int c, bool v) {
    pixels[static_cast<std::size_t>(r) * cols + c] = v ? 1 : 0;
  }
  bool in_bounds(int r, int c) const {
    return r >= 0 && r < rows && c >= 0 && c < cols;
  }
  std::size_t foreground_count() const;

  bool operator==(const BinaryRaster& o) const = default;
};

/// 8-bit RGB image, row-major, 3 bytes per pixel. Overlay rendering output.
struct RgbRaster {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;

  RgbRaster() = default;
  RgbRaster(int r, int c) : rows(r), cols(c), pixels(static_cast<std::size_t>(r) * c * 3, 0) {
    require(r >= 1 && c >= 1, "RgbRaster dimensions must be positive");
  }

  void set(int r, int c, std::uint8_t red, std::uint8_t green, std::uint8_t blue) {
    std::size_t i = (static_cast<std::size_t>(r) * cols + c) * 3;
    pixels[i] = red;
    pixels[i + 1] = green;
    pixels[i + 2] = blue;
  }
};

struct PixelCoord {
  int row = 0;
  int col = 0;
};

struct ReconstructedStaff;  // tracker.hpp

/// Reads a PNG (8-bit gray or RGB) or PGM (P2/P5) file. RGB decodes to luma
/// with Rec.601 weights. The container is sniffed from the leading bytes, not
/// the file extension.
GrayRaster load_gray(const std::string& path);

/// Writes foreground as 255 and background as 0 into an 8-bit gray PNG.
/// Round-trips through load_gray + threshold_gray(.,128) to the same raster.
void save_binary_png(const BinaryRaster& image, const std::string& path);

void save_gray_png(const GrayRaster& image, const std::string& path);
void save_rgb_png(const RgbRaster& image, const std::string& path);

/// pixel >= threshold becomes foreground.
BinaryRaster threshold_gray(const GrayRaster& image, int threshold);

struct OverlayStats {
  std::size_t drawn_pixels = 0;    // pixels painted with the highlight color
  std::size_t clipped_pixels = 0;  // requested outside the raster and skipped
};

/// Draws every staff line as a vertical run of `thickness` pixels centered on
/// the line row, in a fixed highlight color over the (gray) base image. Runs
/// falling outside the raster are clipped, counted in stats, and do not fail.
RgbRaster render_overlay(const GrayRaster& base,
                         const std::vector<ReconstructedStaff>& staves,
                         int thickness, OverlayStats* stats = nullptr);

/// Vertical extent of a line of the given thickness centered on row:
/// rows [row - (t-1)/2, row + t/2]. Shared by the renderer and the generator.
inline std::array<int, 2> thickness_band(int row, int thickness) {
  return {row - (thickness - 1) / 2, row + thickness / 2};
}

}  // namespace staffrec
