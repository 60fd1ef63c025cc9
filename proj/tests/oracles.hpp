// Brute-force reference implementations the production code is checked
// against. Everything here recomputes results from the definitions, without
// sharing code paths with the library.
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "staffrec/raster.hpp"

namespace oracles {

/// Otsu threshold by exhaustive search: for every t, recompute both class
/// weights and means from scratch and maximize w0*w1*(mu0-mu1)^2.
/// Ties resolve to the lowest t; -1 when no two-class split exists.
inline int otsu_exhaustive(const std::array<std::uint64_t, 256>& hist) {
  int best = -1;
  double best_var = -1.0;
  for (int t = 0; t < 256; ++t) {
    double w0 = 0, w1 = 0, s0 = 0, s1 = 0;
    for (int v = 0; v <= t; ++v) {
      w0 += static_cast<double>(hist[static_cast<std::size_t>(v)]);
      s0 += static_cast<double>(hist[static_cast<std::size_t>(v)]) * v;
    }
    for (int v = t + 1; v < 256; ++v) {
      w1 += static_cast<double>(hist[static_cast<std::size_t>(v)]);
      s1 += static_cast<double>(hist[static_cast<std::size_t>(v)]) * v;
    }
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = s0 / w0, mu1 = s1 / w1;
    const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best = t;
    }
  }
  return best;
}

/// Breadth-first 8-connected labeling, row-major first-encounter label order.
inline std::vector<std::int32_t> flood_fill_labels(const staffrec::BinaryRaster& image,
                                                   std::vector<std::size_t>* areas_out = nullptr) {
  const int rows = image.rows, cols = image.cols;
  std::vector<std::int32_t> labels(static_cast<std::size_t>(rows) * cols, 0);
  std::vector<std::size_t> areas(1, 0);
  std::deque<std::pair<int, int>> queue;
  std::int32_t next = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (!image.at(r, c) || labels[static_cast<std::size_t>(r) * cols + c] != 0) continue;
      ++next;
      std::size_t area = 0;
      labels[static_cast<std::size_t>(r) * cols + c] = next;
      queue.emplace_back(r, c);
      while (!queue.empty()) {
        const auto [qr, qc] = queue.front();
        queue.pop_front();
        ++area;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = qr + dr, nc = qc + dc;
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            auto& l = labels[static_cast<std::size_t>(nr) * cols + nc];
            if (image.at(nr, nc) && l == 0) {
              l = next;
              queue.emplace_back(nr, nc);
            }
          }
      }
      areas.push_back(area);
    }
  if (areas_out) *areas_out = areas;
  return labels;
}

inline staffrec::BinaryRaster area_open_brute(const staffrec::BinaryRaster& image, int min_area) {
  std::vector<std::size_t> areas;
  const auto labels = flood_fill_labels(image, &areas);
  staffrec::BinaryRaster out(image.rows, image.cols);
  for (std::size_t i = 0; i < out.pixels.size(); ++i)
    out.pixels[i] =
        labels[i] != 0 && areas[static_cast<std::size_t>(labels[i])] > static_cast<std::size_t>(min_area)
            ? 1
            : 0;
  return out;
}

/// Definitional dilation: a pixel is set when any disc offset reaches a
/// foreground pixel; out-of-bounds neighbors count as background.
inline staffrec::BinaryRaster dilate_brute(const staffrec::BinaryRaster& image, int radius) {
  staffrec::BinaryRaster out(image.rows, image.cols);
  for (int r = 0; r < image.rows; ++r)
    for (int c = 0; c < image.cols; ++c) {
      bool hit = false;
      for (int dr = -radius; dr <= radius && !hit; ++dr)
        for (int dc = -radius; dc <= radius && !hit; ++dc) {
          if (dr * dr + dc * dc > radius * radius) continue;
          const int nr = r + dr, nc = c + dc;
          if (nr >= 0 && nr < image.rows && nc >= 0 && nc < image.cols && image.at(nr, nc))
            hit = true;
        }
      out.set(r, c, hit);
    }
  return out;
}

/// Definitional erosion: the whole disc must be foreground, with
/// out-of-bounds neighbors counting as foreground.
inline staffrec::BinaryRaster erode_brute(const staffrec::BinaryRaster& image, int radius) {
  staffrec::BinaryRaster out(image.rows, image.cols);
  for (int r = 0; r < image.rows; ++r)
    for (int c = 0; c < image.cols; ++c) {
      bool all = true;
      for (int dr = -radius; dr <= radius && all; ++dr)
        for (int dc = -radius; dc <= radius && all; ++dc) {
          if (dr * dr + dc * dc > radius * radius) continue;
          const int nr = r + dr, nc = c + dc;
          if (nr < 0 || nr >= image.rows || nc < 0 || nc >= image.cols) continue;
          if (!image.at(nr, nc)) all = false;
        }
      out.set(r, c, all);
    }
  return out;
}

inline staffrec::BinaryRaster close_brute(const staffrec::BinaryRaster& image, int radius) {
  return erode_brute(dilate_brute(image, radius), radius);
}

inline std::vector<double> moving_average_naive(const std::vector<double>& values, int l) {
  const int n = static_cast<int>(values.size());
  std::vector<double> out(values.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -(l / 2); k <= l / 2; ++k) {
      const int j = i + k;
      if (j >= 0 && j < n) acc += values[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = acc / l;
  }
  return out;
}

/// Dense solve of (p I + (1-p) D^T D) s = p g by Gaussian elimination with
/// partial pivoting; the matrix is assembled from the definition.
inline std::vector<double> smooth_dense(const std::vector<double>& g, double p) {
  const std::size_t n = g.size();
  if (n < 3) return g;
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = p;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const double row[3] = {1.0, -2.0, 1.0};
    for (int u = 0; u < 3; ++u)
      for (int v = 0; v < 3; ++v) a[k + u][k + v] += (1.0 - p) * row[u] * row[v];
  }
  for (std::size_t i = 0; i < n; ++i) a[i][n] = p * g[i];

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = a[i][n];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return x;
}

inline staffrec::BinaryRaster random_raster(std::mt19937& rng, int rows, int cols,
                                            double density) {
  staffrec::BinaryRaster out(rows, cols);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& px : out.pixels) px = unit(rng) < density ? 1 : 0;
  return out;
}

}  // namespace oracles
