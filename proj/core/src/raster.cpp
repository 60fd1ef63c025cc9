#include "staffrec/raster.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <numeric>

#include "staffrec/tracker.hpp"

namespace staffrec {

namespace {

constexpr std::uint8_t kOverlayR = 220;
constexpr std::uint8_t kOverlayG = 30;
constexpr std::uint8_t kOverlayB = 30;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  (void)png;
  throw format_error(std::string("PNG: ") + msg);
}

void png_warn_fn(png_structp, png_const_charp) {}

GrayRaster load_png(const std::string& path, std::FILE* fp) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warn_fn);
  if (!png) throw io_error("PNG: failed to allocate reader");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw io_error("PNG: failed to allocate info struct");
  }

  GrayRaster out;
  try {
    png_init_io(png, fp);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);

    if (depth > 8)
      throw format_error(path + ": unsupported format: " + std::to_string(depth) + "-bit PNG");
    if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_RGB)
      throw format_error(path + ": unsupported format: PNG color type " + std::to_string(color) +
                         " (expected 8-bit gray or RGB)");
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    const int channels = png_get_channels(png, info);
    std::vector<std::uint8_t> rowbuf(rowbytes);

    out.rows = static_cast<int>(h);
    out.cols = static_cast<int>(w);
    out.pixels.resize(static_cast<std::size_t>(out.rows) * out.cols);
    for (png_uint_32 r = 0; r < h; ++r) {
      png_read_row(png, rowbuf.data(), nullptr);
      std::uint8_t* dst = out.pixels.data() + static_cast<std::size_t>(r) * w;
      if (channels == 1) {
        std::memcpy(dst, rowbuf.data(), w);
      } else {
        for (png_uint_32 c = 0; c < w; ++c) {
          const std::uint8_t* px = rowbuf.data() + 3 * c;
          // Rec.601 luma
          double y = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
          long v = std::lround(y);
          dst[c] = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
        }
      }
    }
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

// PGM header tokens are separated by whitespace; '#' starts a comment that
// runs to end of line.
int pgm_next_int(std::istream& in, const std::string& path) {
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
    } else if (!std::isspace(ch)) {
      break;
    }
  }
  if (ch == EOF) throw format_error(path + ": PGM: truncated header");
  if (!std::isdigit(ch)) throw format_error(path + ": PGM: bad header token");
  long v = ch - '0';
  while ((ch = in.peek()) != EOF && std::isdigit(ch)) {
    in.get();
    v = v * 10 + (ch - '0');
    if (v > 1 << 30) throw format_error(path + ": PGM: header value out of range");
  }
  return static_cast<int>(v);
}

GrayRaster load_pgm(const std::string& path, bool binary_raster) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path + ": cannot open for reading");
  char magic[2];
  in.read(magic, 2);

  const int cols = pgm_next_int(in, path);
  const int rows = pgm_next_int(in, path);
  const int maxval = pgm_next_int(in, path);
  if (cols < 1 || rows < 1) throw format_error(path + ": PGM: non-positive dimensions");
  if (maxval < 1 || maxval > 255)
    throw format_error(path + ": unsupported format: PGM maxval " + std::to_string(maxval));

  GrayRaster out(rows, cols);
  if (binary_raster) {
    int ch = in.get();  // single whitespace byte after maxval
    if (ch == EOF) throw format_error(path + ": PGM: truncated header");
    in.read(reinterpret_cast<char*>(out.pixels.data()),
            static_cast<std::streamsize>(out.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(out.pixels.size()))
      throw format_error(path + ": PGM: truncated pixel data");
  } else {
    for (auto& px : out.pixels) {
      int v = pgm_next_int(in, path);
      if (v > maxval) throw format_error(path + ": PGM: sample exceeds maxval");
      px = static_cast<std::uint8_t>(v);
    }
  }
  return out;
}

void write_png(const std::string& path, int rows, int cols, int color_type,
               const std::uint8_t* data) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw io_error(path + ": cannot open for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warn_fn);
  if (!png) throw io_error("PNG: failed to allocate writer");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw io_error("PNG: failed to allocate info struct");
  }

  try {
    png_init_io(png, fp.get());
    // Big pages dominate batch runtime; favor encode speed over ratio.
    png_set_compression_level(png, 1);
    png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride =
        static_cast<std::size_t>(cols) * (color_type == PNG_COLOR_TYPE_RGB ? 3 : 1);
    for (int r = 0; r < rows; ++r)
      png_write_row(png, const_cast<png_bytep>(data + static_cast<std::size_t>(r) * stride));
    png_write_end(png, info);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  if (std::fflush(fp.get()) != 0) throw io_error(path + ": write failed");
}

}  // namespace

std::size_t BinaryRaster::foreground_count() const {
  return static_cast<std::size_t>(
      std::accumulate(pixels.begin(), pixels.end(), std::uint64_t{0}));
}

GrayRaster load_gray(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw io_error(path + ": cannot open for reading");
  unsigned char magic[8] = {0};
  const std::size_t got = std::fread(magic, 1, sizeof magic, fp.get());

  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (got >= 8 && std::memcmp(magic, png_sig, 8) == 0) {
    std::rewind(fp.get());
    return load_png(path, fp.get());
  }
  if (got >= 2 && magic[0] == 'P') {
    if (magic[1] == '2') return load_pgm(path, false);
    if (magic[1] == '5') return load_pgm(path, true);
    if (magic[1] == '3' || magic[1] == '6')
      throw format_error(path + ": unsupported format: PPM (P" + std::string(1, magic[1]) + ")");
    if (magic[1] == '1' || magic[1] == '4')
      throw format_error(path + ": unsupported format: PBM");
  }
  if (got >= 2 && magic[0] == 0xff && magic[1] == 0xd8)
    throw format_error(path + ": unsupported format: JPEG");
  throw format_error(path + ": unsupported format: not PNG or PGM");
}

void save_binary_png(const BinaryRaster& image, const std::string& path) {
  std::vector<std::uint8_t> bytes(image.pixels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = image.pixels[i] ? 255 : 0;
  write_png(path, image.rows, image.cols, PNG_COLOR_TYPE_GRAY, bytes.data());
}

void save_gray_png(const GrayRaster& image, const std::string& path) {
  write_png(path, image.rows, image.cols, PNG_COLOR_TYPE_GRAY, image.pixels.data());
}

void save_rgb_png(const RgbRaster& image, const std::string& path) {
  write_png(path, image.rows, image.cols, PNG_COLOR_TYPE_RGB, image.pixels.data());
}

BinaryRaster threshold_gray(const GrayRaster& image, int threshold) {
  BinaryRaster out(image.rows, image.cols);
  for (std::size_t i = 0; i < image.pixels.size(); ++i)
    out.pixels[i] = image.pixels[i] >= threshold ? 1 : 0;
  return out;
}

RgbRaster render_overlay(const GrayRaster& base, const std::vector<ReconstructedStaff>& staves,
                         int thickness, OverlayStats* stats) {
  require(thickness >= 1, "render_overlay: thickness must be positive");
  RgbRaster out(base.rows, base.cols);
  for (int r = 0; r < base.rows; ++r)
    for (int c = 0; c < base.cols; ++c) {
      std::uint8_t v = base.at(r, c);
      out.set(r, c, v, v, v);
    }

  OverlayStats local;
  for (const auto& staff : staves) {
    for (const auto& line : staff.lines) {
      for (int m = staff.col_start; m <= staff.col_end; ++m) {
        if (m < 0 || m >= base.cols) {
          local.clipped_pixels += static_cast<std::size_t>(thickness);
          continue;
        }
        const int row = line[static_cast<std::size_t>(m - staff.col_start)];
        const auto [lo, hi] = thickness_band(row, thickness);
        for (int r = lo; r <= hi; ++r) {
          if (r < 0 || r >= base.rows) {
            ++local.clipped_pixels;
            continue;
          }
          out.set(r, m, kOverlayR, kOverlayG, kOverlayB);
          ++local.drawn_pixels;
        }
      }
    }
  }
  if (stats) *stats = local;
  return out;
}

}  // namespace staffrec
