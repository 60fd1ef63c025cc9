#include "staffrec/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace staffrec {

namespace {

constexpr double kInf = 1e15;  // larger than any squared pixel distance

// Squared Euclidean distance from every pixel to the nearest seed pixel
// (Felzenszwalb-Huttenlocher, column pass then row pass). Pixels in rasters
// without seeds end up at kInf.
std::vector<double> squared_distance_to(const BinaryRaster& image, bool seed_value) {
  const int rows = image.rows, cols = image.cols;
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  std::vector<double> dist(n);

  // Column pass: distance along each column, in rows.
  for (int c = 0; c < cols; ++c) {
    double d = kInf;
    for (int r = 0; r < rows; ++r) {
      d = image.at(r, c) == seed_value ? 0.0 : std::min(d + 1.0, kInf);
      dist[static_cast<std::size_t>(r) * cols + c] = d;
    }
    d = dist[static_cast<std::size_t>(rows - 1) * cols + c];
    for (int r = rows - 2; r >= 0; --r) {
      d = std::min(d + 1.0, kInf);
      double& cell = dist[static_cast<std::size_t>(r) * cols + c];
      cell = std::min(cell, d);
      d = cell;
    }
  }

  // Row pass: lower envelope of parabolas (c - c')^2 + G(c')^2.
  std::vector<double> f(cols), out(cols), z(static_cast<std::size_t>(cols) + 1);
  std::vector<int> v(cols);
  for (int r = 0; r < rows; ++r) {
    double* row = dist.data() + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) {
      double g = row[c];
      f[c] = g >= kInf ? kInf : g * g;
    }
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < cols; ++q) {
      double s;
      while (true) {
        const int p = v[k];
        s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
            (2.0 * q - 2.0 * p);
        if (s <= z[k]) {
          --k;
        } else {
          break;
        }
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
    }
    k = 0;
    for (int c = 0; c < cols; ++c) {
      while (z[k + 1] < c) ++k;
      const double dc = static_cast<double>(c) - v[k];
      out[c] = std::min(dc * dc + f[v[k]], kInf);
    }
    std::copy(out.begin(), out.end(), row);
  }
  return dist;
}

}  // namespace

int PreprocessParams::disc_radius() const {
  require(min_area > 0, "PreprocessParams: min_area must be positive");
  return static_cast<int>(std::lround(std::sqrt(min_area / std::numbers::pi)));
}

std::array<std::uint64_t, 256> gray_histogram(const GrayRaster& image) {
  std::array<std::uint64_t, 256> hist{};
  for (std::uint8_t px : image.pixels) ++hist[px];
  return hist;
}

int otsu_threshold(const std::array<std::uint64_t, 256>& hist) {
  std::int64_t total = 0, total_sum = 0;
  for (int v = 0; v < 256; ++v) {
    total += static_cast<std::int64_t>(hist[v]);
    total_sum += static_cast<std::int64_t>(hist[v]) * v;
  }

  int best = -1;
  double best_var = -1.0;
  std::int64_t w0 = 0, sum0 = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += static_cast<std::int64_t>(hist[t]);
    sum0 += static_cast<std::int64_t>(hist[t]) * t;
    const std::int64_t w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    // Between-class variance up to a constant factor:
    // (mu0 - mu1)^2 * w0 * w1 == a^2 / (w0 * w1) with exact integer a.
    const std::int64_t a = sum0 * w1 - (total_sum - sum0) * w0;
    const double var =
        static_cast<double>(a) * static_cast<double>(a) /
        (static_cast<double>(w0) * static_cast<double>(w1));
    if (var > best_var) {
      best_var = var;
      best = t;
    }
  }
  return best;
}

BinaryRaster otsu_binarize(const GrayRaster& image) {
  const int t = otsu_threshold(gray_histogram(image));
  BinaryRaster out(image.rows, image.cols);
  if (t < 0) return out;  // single-class image: all background
  for (std::size_t i = 0; i < image.pixels.size(); ++i)
    out.pixels[i] = image.pixels[i] > t ? 1 : 0;
  return out;
}

ComponentLabeling label_components(const BinaryRaster& image) {
  ComponentLabeling lab;
  lab.rows = image.rows;
  lab.cols = image.cols;
  lab.labels.assign(static_cast<std::size_t>(image.rows) * image.cols, 0);
  lab.areas.assign(1, 0);

  const int rows = image.rows, cols = image.cols;
  std::vector<std::size_t> stack;
  std::int32_t next = 0;
  for (std::size_t start = 0; start < lab.labels.size(); ++start) {
    if (!image.pixels[start] || lab.labels[start] != 0) continue;
    ++next;
    std::size_t area = 0;
    lab.labels[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      ++area;
      const int r = static_cast<int>(i / cols), c = static_cast<int>(i % cols);
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int nr = r + dr, nc = c + dc;
          if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          const std::size_t j = static_cast<std::size_t>(nr) * cols + nc;
          if (image.pixels[j] && lab.labels[j] == 0) {
            lab.labels[j] = next;
            stack.push_back(j);
          }
        }
    }
    lab.areas.push_back(area);
  }
  return lab;
}

BinaryRaster area_open(const BinaryRaster& image, int min_area) {
  require(min_area > 0, "area_open: min_area must be positive");
  const ComponentLabeling lab = label_components(image);
  BinaryRaster out(image.rows, image.cols);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const std::int32_t l = lab.labels[i];
    out.pixels[i] = (l != 0 && lab.areas[l] > static_cast<std::size_t>(min_area)) ? 1 : 0;
  }
  return out;
}

BinaryRaster dilate_disc(const BinaryRaster& image, int radius) {
  require(radius >= 0, "dilate_disc: radius must be nonnegative");
  if (image.foreground_count() == 0) return image;
  const auto dist = squared_distance_to(image, true);
  const double r2 = static_cast<double>(radius) * radius;
  BinaryRaster out(image.rows, image.cols);
  for (std::size_t i = 0; i < dist.size(); ++i) out.pixels[i] = dist[i] <= r2 ? 1 : 0;
  return out;
}

BinaryRaster erode_disc(const BinaryRaster& image, int radius) {
  require(radius >= 0, "erode_disc: radius must be nonnegative");
  const auto dist = squared_distance_to(image, false);  // distance to background
  const double r2 = static_cast<double>(radius) * radius;
  BinaryRaster out(image.rows, image.cols);
  for (std::size_t i = 0; i < dist.size(); ++i) out.pixels[i] = dist[i] > r2 ? 1 : 0;
  return out;
}

BinaryRaster close_disc(const BinaryRaster& image, const PreprocessParams& params) {
  if (image.foreground_count() == 0) return image;
  const int r = params.disc_radius();
  return erode_disc(dilate_disc(image, r), r);
}

BinaryRaster preprocess(const GrayRaster& image, const PreprocessParams& params) {
  return close_disc(area_open(otsu_binarize(image), params.min_area), params);
}

}  // namespace staffrec
