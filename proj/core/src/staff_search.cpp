#include "staffrec/staff_search.hpp"

#include <algorithm>
#include <cmath>

namespace staffrec {

Projection y_projection(const BinaryRaster& image, int col_start, int col_end) {
  require(col_start >= 0 && col_end <= image.cols && col_start < col_end,
          "y_projection: stripe must be a nonempty column interval inside the image");
  Projection proj;
  proj.col_start = col_start;
  proj.col_end = col_end;
  proj.values.assign(static_cast<std::size_t>(image.rows), 0.0);
  for (int r = 0; r < image.rows; ++r) {
    const std::uint8_t* row = image.pixels.data() + static_cast<std::size_t>(r) * image.cols;
    int count = 0;
    for (int c = col_start; c < col_end; ++c) count += row[c];
    proj.values[static_cast<std::size_t>(r)] = count;
  }
  return proj;
}

Projection smooth_projection(const Projection& proj, int ma_length) {
  require(ma_length >= 1 && ma_length % 2 == 1, "smooth_projection: length must be odd");
  const int n = static_cast<int>(proj.values.size());
  const int half = ma_length / 2;
  Projection out = proj;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
    for (int j = lo; j <= hi; ++j) acc += proj.values[static_cast<std::size_t>(j)];
    out.values[static_cast<std::size_t>(i)] = acc / ma_length;  // zero padding outside
  }
  return out;
}

Projection threshold_projection(const Projection& proj, int stripe_width, double frac) {
  const double h_th = frac * stripe_width;
  Projection out = proj;
  for (double& v : out.values)
    if (!(v > h_th)) v = 0.0;
  return out;
}

std::vector<int> local_maxima(const Projection& proj, int min_sep) {
  const int n = static_cast<int>(proj.values.size());
  const auto& v = proj.values;

  struct Candidate {
    int row;
    double height;
  };
  std::vector<Candidate> cands;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v[static_cast<std::size_t>(j + 1)] == v[static_cast<std::size_t>(i)]) ++j;
    const double h = v[static_cast<std::size_t>(i)];
    const bool rises = i == 0 || v[static_cast<std::size_t>(i - 1)] < h;
    const bool falls = j == n - 1 || v[static_cast<std::size_t>(j + 1)] < h;
    if (h > 0.0 && rises && falls) cands.push_back({(i + j) / 2, h});
    i = j + 1;
  }

  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.height != b.height) return a.height > b.height;
    return a.row < b.row;
  });

  std::vector<int> accepted;
  for (const auto& c : cands) {
    bool blocked = false;
    for (int a : accepted)
      if (std::abs(a - c.row) < min_sep) {
        blocked = true;
        break;
      }
    if (!blocked) accepted.push_back(c.row);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

std::optional<StaffHypothesis> find_tetragram(const std::vector<int>& maxima,
                                              const SearchParams& params) {
  if (maxima.size() < 4) return std::nullopt;
  for (std::size_t w = 0; w + 3 < maxima.size(); ++w) {
    std::array<double, 3> d{};
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      d[static_cast<std::size_t>(i)] = maxima[w + static_cast<std::size_t>(i) + 1] -
                                       maxima[w + static_cast<std::size_t>(i)];
      if (d[static_cast<std::size_t>(i)] < params.sep_min ||
          d[static_cast<std::size_t>(i)] > params.sep_max)
        ok = false;
    }
    if (ok) {
      for (int i = 0; i < 3 && ok; ++i) {
        const double other = (d[0] + d[1] + d[2] - d[static_cast<std::size_t>(i)]) / 2.0;
        if (std::abs(d[static_cast<std::size_t>(i)] - other) > params.spacing_tol * other)
          ok = false;
      }
    }
    if (ok) {
      StaffHypothesis hyp;
      for (int i = 0; i < 4; ++i)
        hyp.peak_rows[static_cast<std::size_t>(i)] = maxima[w + static_cast<std::size_t>(i)];
      hyp.deltas = d;
      hyp.mean_sep = (d[0] + d[1] + d[2]) / 3.0;
      return hyp;
    }
  }
  return std::nullopt;
}

std::pair<int, int> stripe_bounds(int cols, int n_stripes, int s) {
  const int w = std::max(1, cols / n_stripes);
  const int start = s * w;
  const int end = (s == n_stripes - 1) ? cols : std::min(cols, start + w);
  return {start, end};
}

std::optional<SearchResult> search_staff(const BinaryRaster& image, const SearchParams& params) {
  require(params.n_stripes >= 1, "search_staff: n_stripes must be positive");
  for (int s = 0; s < params.n_stripes; ++s) {
    const auto [c0, c1] = stripe_bounds(image.cols, params.n_stripes, s);
    if (c0 >= c1) break;  // no columns left for this stripe
    Projection proj = y_projection(image, c0, c1);
    proj = smooth_projection(proj, params.ma_length);
    proj = threshold_projection(proj, c1 - c0, params.threshold_frac);
    const std::vector<int> maxima = local_maxima(proj, params.sep_min);
    if (auto hyp = find_tetragram(maxima, params)) {
      hyp->col_start = c0;
      hyp->col_end = c1;
      return SearchResult{*hyp, s};
    }
  }
  return std::nullopt;
}

}  // namespace staffrec
