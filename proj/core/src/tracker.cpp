#include "staffrec/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace staffrec {

namespace {

int ceil_frac(double mean_sep, double frac) {
  return std::max(1, static_cast<int>(std::ceil(mean_sep * frac)));
}

/// Vertical foreground run through (row, col): [top, bottom] inclusive.
struct Run {
  int top = 0;
  int bottom = 0;

  double center() const { return (top + bottom) / 2.0; }
  int length() const { return bottom - top + 1; }
  bool operator==(const Run&) const = default;
};

std::optional<Run> run_through(const BinaryRaster& image, int row, int col) {
  if (row < 0 || row >= image.rows || !image.at(row, col)) return std::nullopt;
  Run run{row, row};
  while (run.top > 0 && image.at(run.top - 1, col)) --run.top;
  while (run.bottom + 1 < image.rows && image.at(run.bottom + 1, col)) ++run.bottom;
  return run;
}

/// Per-line ring of the most recent slope deltas (window S).
class SlopeWindow {
 public:
  explicit SlopeWindow(int capacity) : capacity_(capacity) {}

  void push(double delta) {
    if (static_cast<int>(buf_.size()) < capacity_) {
      buf_.push_back(delta);
      sum_ += delta;
    } else {
      sum_ += delta - buf_[head_];
      buf_[head_] = delta;
      head_ = (head_ + 1) % capacity_;
    }
  }

  bool full() const { return static_cast<int>(buf_.size()) == capacity_; }
  double mean() const { return buf_.empty() ? 0.0 : sum_ / static_cast<double>(buf_.size()); }

 private:
  int capacity_;
  std::size_t head_ = 0;
  double sum_ = 0.0;
  std::vector<double> buf_;
};

void check_ordering(const std::array<double, 4>& g, int col) {
  for (int i = 0; i < 3; ++i)
    if (!(g[static_cast<std::size_t>(i)] < g[static_cast<std::size_t>(i) + 1]))
      throw contract_violation("tracker: staff line ordering violated at column " +
                               std::to_string(col));
}

}  // namespace

std::size_t TrackedStaff::detected_count() const {
  std::size_t n = 0;
  for (const auto& line : status)
    for (const PixelStatus& s : line)
      if (s.state == TrackState::Detected) ++n;
  return n;
}

std::optional<Seed> find_seed(const BinaryRaster& image, const StaffHypothesis& hyp,
                              TrackDirection direction, const TrackerParams& params) {
  require(params.seed_tile_height >= 1 && params.seed_tile_height % 2 == 1,
          "find_seed: seed tile height must be odd");
  const int w = ceil_frac(hyp.mean_sep, params.seed_tile_width_frac);
  const int half_h = params.seed_tile_height / 2;
  const int lo_off = w / 2;              // columns [c - lo_off, c + w - 1 - lo_off]
  const int hi_off = w - 1 - lo_off;

  const int first = direction == TrackDirection::LeftToRight ? lo_off : image.cols - 1 - hi_off;
  const int last = direction == TrackDirection::LeftToRight ? image.cols - 1 - hi_off : lo_off;
  const int step = direction == TrackDirection::LeftToRight ? 1 : -1;

  for (int c = first; step > 0 ? c <= last : c >= last; c += step) {
    bool all = true;
    for (int i = 0; i < 4 && all; ++i) {
      const int pr = hyp.peak_rows[static_cast<std::size_t>(i)];
      if (pr - half_h < 0 || pr + half_h >= image.rows) {
        all = false;
        break;
      }
      for (int r = pr - half_h; r <= pr + half_h && all; ++r)
        for (int cc = c - lo_off; cc <= c + hi_off; ++cc)
          if (!image.at(r, cc)) {
            all = false;
            break;
          }
    }
    if (!all) continue;
    Seed seed;
    seed.col = c;
    for (int i = 0; i < 4; ++i) {
      const auto run = run_through(image, hyp.peak_rows[static_cast<std::size_t>(i)], c);
      seed.rows[static_cast<std::size_t>(i)] = run->center();  // tile is foreground, run exists
    }
    return seed;
  }
  return std::nullopt;
}

TrackedStaff track_direction(const BinaryRaster& image, const Seed& seed, double mean_sep,
                             const TrackerParams& params, TrackDirection direction) {
  const int cols = image.cols;
  const int slope_window = ceil_frac(mean_sep, params.slope_window_frac);
  const int halfwidth = ceil_frac(mean_sep, params.search_halfwidth_frac);
  const int step = direction == TrackDirection::LeftToRight ? 1 : -1;

  TrackedStaff out;
  out.col_start = 0;
  out.col_end = cols - 1;
  out.mean_sep = mean_sep;
  for (int i = 0; i < 4; ++i) {
    out.lines[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(cols), 0.0);
    out.status[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(cols), PixelStatus{});
  }

  auto put = [&](int i, int m, double g, PixelStatus st) {
    out.lines[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] = g;
    out.status[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] = st;
  };

  std::array<double, 4> g = seed.rows;
  check_ordering(g, seed.col);
  for (int i = 0; i < 4; ++i) {
    put(i, seed.col, g[static_cast<std::size_t>(i)], {TrackState::Detected, 0});
    const auto run = run_through(
        image, static_cast<int>(std::lround(g[static_cast<std::size_t>(i)])), seed.col);
    if (run) out.thickness_samples.push_back(run->length());
  }

  std::array<SlopeWindow, 4> slopes{SlopeWindow(slope_window), SlopeWindow(slope_window),
                                    SlopeWindow(slope_window), SlopeWindow(slope_window)};

  for (int m = seed.col + step; m >= 0 && m < cols; m += step) {
    std::array<std::optional<double>, 4> detected;
    std::array<int, 4> run_len{};
    for (int i = 0; i < 4; ++i) {
      const double prev = g[static_cast<std::size_t>(i)];
      const int band = static_cast<int>(std::lround(prev));
      std::optional<Run> best;
      for (int r = band - 1; r <= band + 1; ++r) {
        const auto run = run_through(image, r, m);
        if (!run || run == best) continue;
        if (std::abs(run->center() - prev) > halfwidth) continue;
        if (!best || std::abs(run->center() - prev) < std::abs(best->center() - prev))
          best = run;
      }
      if (best) {
        detected[static_cast<std::size_t>(i)] = best->center();
        run_len[static_cast<std::size_t>(i)] = best->length();
      }
    }

    const int n_detected =
        static_cast<int>(std::count_if(detected.begin(), detected.end(),
                                       [](const auto& d) { return d.has_value(); }));

    if (n_detected > 0) {
      double delta_sum = 0.0;
      for (int i = 0; i < 4; ++i)
        if (detected[static_cast<std::size_t>(i)])
          delta_sum += *detected[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)];
      const double mean_delta = delta_sum / n_detected;

      for (int i = 0; i < 4; ++i) {
        if (detected[static_cast<std::size_t>(i)]) {
          const double delta =
              *detected[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)];
          g[static_cast<std::size_t>(i)] = *detected[static_cast<std::size_t>(i)];
          slopes[static_cast<std::size_t>(i)].push(delta);
          put(i, m, g[static_cast<std::size_t>(i)], {TrackState::Detected, 0});
          out.thickness_samples.push_back(run_len[static_cast<std::size_t>(i)]);
        } else {
          g[static_cast<std::size_t>(i)] += mean_delta;
          slopes[static_cast<std::size_t>(i)].push(mean_delta);
          put(i, m, g[static_cast<std::size_t>(i)],
              {TrackState::Estimated, static_cast<std::uint8_t>(n_detected)});
        }
      }
    } else {
      // No ink anywhere: move all four lines by the mean of their windowed
      // slopes; a window that never filled counts as horizontal. The stored
      // delta is zeroed so long gaps decay toward horizontal.
      double update_sum = 0.0;
      for (int i = 0; i < 4; ++i)
        update_sum += slopes[static_cast<std::size_t>(i)].full()
                          ? slopes[static_cast<std::size_t>(i)].mean()
                          : 0.0;
      const double common = update_sum / 4.0;
      for (int i = 0; i < 4; ++i) {
        g[static_cast<std::size_t>(i)] += common;
        slopes[static_cast<std::size_t>(i)].push(0.0);
        put(i, m, g[static_cast<std::size_t>(i)], {TrackState::Extrapolated, 0});
      }
    }
    check_ordering(g, m);
  }

  // Cover the short span between the seed and the near edge.
  for (int m = seed.col - step; m >= 0 && m < cols; m -= step)
    for (int i = 0; i < 4; ++i)
      put(i, m, seed.rows[static_cast<std::size_t>(i)], {TrackState::Extrapolated, 0});

  return out;
}

TrackedStaff merge_tracks(const TrackedStaff& a, const TrackedStaff& b) {
  require(a.col_start == b.col_start && a.col_end == b.col_end,
          "merge_tracks: passes must cover the same column range");

  const bool a_principal = a.detected_count() >= b.detected_count();
  const TrackedStaff& principal = a_principal ? a : b;
  const TrackedStaff& other = a_principal ? b : a;

  TrackedStaff merged = principal;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t m = 0; m < merged.lines[i].size(); ++m) {
      const PixelStatus ps = principal.status[i][m];
      const bool weak = ps.state == TrackState::Extrapolated ||
                        (ps.state == TrackState::Estimated && ps.support == 1);
      if (!weak) continue;
      const PixelStatus os = other.status[i][m];
      const bool strong = os.state == TrackState::Detected ||
                          (os.state == TrackState::Estimated && os.support >= 2);
      if (strong) {
        merged.lines[i][m] = other.lines[i][m];
        merged.status[i][m] = os;
      }
    }
  }
  return merged;
}

BinaryRaster remove_staff(const BinaryRaster& image, const TrackedStaff& staff,
                          const TrackerParams& params) {
  const int margin = ceil_frac(staff.mean_sep, params.removal_margin_frac);
  const auto [top_it, bottom_it] = std::pair{
      std::min_element(staff.lines[0].begin(), staff.lines[0].end()),
      std::max_element(staff.lines[3].begin(), staff.lines[3].end())};
  const int r0 = std::max(0, static_cast<int>(std::floor(*top_it)) - margin);
  const int r1 = std::min(image.rows - 1, static_cast<int>(std::ceil(*bottom_it)) + margin);

  BinaryRaster out = image;
  for (int r = r0; r <= r1; ++r)
    std::fill_n(out.pixels.begin() + static_cast<std::size_t>(r) * out.cols, out.cols, 0);
  return out;
}

BinaryRaster render_staff_image(int rows, int cols,
                                const std::vector<ReconstructedStaff>& staves) {
  BinaryRaster out(rows, cols);
  for (const auto& staff : staves)
    for (const auto& line : staff.lines)
      for (int m = std::max(0, staff.col_start); m <= std::min(cols - 1, staff.col_end); ++m) {
        const auto [lo, hi] =
            thickness_band(line[static_cast<std::size_t>(m - staff.col_start)], staff.thickness);
        for (int r = std::max(0, lo); r <= std::min(rows - 1, hi); ++r) out.set(r, m, true);
      }
  return out;
}

GrayRaster to_gray(const BinaryRaster& image) {
  GrayRaster out(image.rows, image.cols);
  for (std::size_t i = 0; i < image.pixels.size(); ++i)
    out.pixels[i] = image.pixels[i] ? 255 : 0;
  return out;
}

namespace {

ReconstructedStaff smooth_and_round(const TrackedStaff& tracked, const SmoothingParams& sp) {
  ReconstructedStaff rec;
  rec.col_start = tracked.col_start;
  rec.col_end = tracked.col_end;
  rec.status = tracked.status;
  rec.mean_sep = tracked.mean_sep;
  for (std::size_t i = 0; i < 4; ++i)
    rec.lines[i] = round_curve(smooth_curve(tracked.lines[i], sp));

  if (tracked.thickness_samples.empty()) {
    rec.thickness = 10;  // fallback when no run was ever measured
  } else {
    const double mean =
        std::accumulate(tracked.thickness_samples.begin(), tracked.thickness_samples.end(), 0.0) /
        static_cast<double>(tracked.thickness_samples.size());
    rec.thickness = std::max(1, static_cast<int>(std::lround(mean)));
  }
  return rec;
}

BinaryRaster remove_rows(const BinaryRaster& image, int r0, int r1) {
  BinaryRaster out = image;
  for (int r = std::max(0, r0); r <= std::min(image.rows - 1, r1); ++r)
    std::fill_n(out.pixels.begin() + static_cast<std::size_t>(r) * out.cols, out.cols, 0);
  return out;
}

}  // namespace

std::vector<ReconstructedStaff> reconstruct_page(const GrayRaster& image,
                                                 const PipelineParams& params) {
  BinaryRaster working = preprocess(image, params.preprocess);
  std::vector<ReconstructedStaff> staves;

  while (auto found = search_staff(working, params.search)) {
    const StaffHypothesis& hyp = found->hypothesis;
    const auto seed_l = find_seed(working, hyp, TrackDirection::LeftToRight, params.tracker);
    const auto seed_r = find_seed(working, hyp, TrackDirection::RightToLeft, params.tracker);

    if (!seed_l && !seed_r) {
      // Unseedable hypothesis: clear its stripe so the loop cannot revisit it.
      // The margin must reach the ink that fed the smoothed peaks, hence the
      // moving-average half-length floor.
      const int margin = std::max(ceil_frac(hyp.mean_sep, params.tracker.removal_margin_frac),
                                  params.search.ma_length / 2 + 1);
      working = remove_rows(working, hyp.peak_rows[0] - margin, hyp.peak_rows[3] + margin);
      continue;
    }

    std::optional<TrackedStaff> merged;
    if (seed_l && seed_r) {
      const TrackedStaff left =
          track_direction(working, *seed_l, hyp.mean_sep, params.tracker,
                          TrackDirection::LeftToRight);
      const TrackedStaff right =
          track_direction(working, *seed_r, hyp.mean_sep, params.tracker,
                          TrackDirection::RightToLeft);
      merged = merge_tracks(left, right);
    } else {
      merged = track_direction(working, seed_l ? *seed_l : *seed_r, hyp.mean_sep, params.tracker,
                               seed_l ? TrackDirection::LeftToRight
                                      : TrackDirection::RightToLeft);
    }

    staves.push_back(smooth_and_round(*merged, params.smoothing));
    working = remove_staff(working, *merged, params.tracker);
  }
  return staves;
}

}  // namespace staffrec
