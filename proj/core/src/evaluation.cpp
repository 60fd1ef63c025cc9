#include "staffrec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "staffrec/spline.hpp"

namespace staffrec {

std::size_t GroundTruth::total_pixels() const {
  std::size_t n = 0;
  for (const auto& staff : staves)
    for (const auto& line : staff.lines) n += line.rows.size();
  return n;
}

GroundTruth rasterize_ground_truth(
    const std::vector<std::array<std::vector<std::pair<double, double>>, 4>>& control_points,
    int image_rows, int image_cols) {
  GroundTruth gt;
  gt.staves.reserve(control_points.size());
  for (const auto& staff_cps : control_points) {
    GroundTruthStaff staff;
    for (std::size_t i = 0; i < 4; ++i) {
      GroundTruthLine& line = staff.lines[i];
      line.control_points = staff_cps[i];
      require(line.control_points.size() >= 2,
              "ground truth: each line needs at least 2 control points");
      line.col_start =
          std::max(0, static_cast<int>(std::ceil(line.control_points.front().first)));
      line.col_end = std::min(image_cols - 1,
                              static_cast<int>(std::floor(line.control_points.back().first)));
      require(line.col_start <= line.col_end, "ground truth: line span is empty");
      const Curve curve = interp_spline(line.control_points, line.col_start, line.col_end);
      line.rows = round_curve(curve.values);
      for (int& r : line.rows) r = std::clamp(r, 0, image_rows - 1);
    }
    // Lines must be vertically ordered and non-crossing over shared columns.
    for (std::size_t i = 0; i + 1 < 4; ++i) {
      const auto& top = staff.lines[i];
      const auto& bot = staff.lines[i + 1];
      const int lo = std::max(top.col_start, bot.col_start);
      const int hi = std::min(top.col_end, bot.col_end);
      for (int m = lo; m <= hi; ++m)
        require(top.rows[static_cast<std::size_t>(m - top.col_start)] <=
                    bot.rows[static_cast<std::size_t>(m - bot.col_start)],
                "ground truth: staff lines cross at column " + std::to_string(m));
    }
    gt.staves.push_back(std::move(staff));
  }
  return gt;
}

int effective_vertical_tol(const std::vector<ReconstructedStaff>& recon,
                           const EvalParams& params) {
  if (params.vertical_tol > 0) return params.vertical_tol;
  if (recon.empty()) return 1;
  double sum = 0.0;
  for (const auto& staff : recon) sum += staff.thickness;
  return std::max(1, static_cast<int>(std::lround(sum / static_cast<double>(recon.size()))));
}

EvalCounts classify_pixels(const std::vector<ReconstructedStaff>& recon, const GroundTruth& gt,
                           const BinaryRaster& binary, const EvalParams& params) {
  const int tol = effective_vertical_tol(recon, params);
  const int rows = binary.rows, cols = binary.cols;

  for (const auto& staff : gt.staves)
    for (const auto& line : staff.lines)
      require(line.col_end < cols, "classify_pixels: ground truth exceeds image width");

  // Pixels of one column, gathered in deterministic (staff, line) order.
  struct ColumnPixel {
    int row;
    bool matched = false;
  };
  std::vector<ColumnPixel> gt_px, rc_px;

  struct PairCand {
    int dist;
    std::size_t gi, ri;
  };
  std::vector<PairCand> pairs;

  EvalCounts counts;
  auto foreground = [&](int r, int m) {
    return r >= 0 && r < rows && binary.at(r, m);
  };

  for (int m = 0; m < cols; ++m) {
    gt_px.clear();
    rc_px.clear();
    for (const auto& staff : gt.staves)
      for (const auto& line : staff.lines)
        if (m >= line.col_start && m <= line.col_end)
          gt_px.push_back({line.rows[static_cast<std::size_t>(m - line.col_start)]});
    for (const auto& staff : recon)
      for (const auto& line : staff.lines)
        if (m >= staff.col_start && m <= staff.col_end)
          rc_px.push_back({line[static_cast<std::size_t>(m - staff.col_start)]});
    if (gt_px.empty() && rc_px.empty()) continue;

    pairs.clear();
    for (std::size_t gi = 0; gi < gt_px.size(); ++gi)
      for (std::size_t ri = 0; ri < rc_px.size(); ++ri) {
        const int d = std::abs(rc_px[ri].row - gt_px[gi].row);
        if (d <= tol) pairs.push_back({d, gi, ri});
      }
    std::sort(pairs.begin(), pairs.end(), [](const PairCand& a, const PairCand& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      if (a.gi != b.gi) return a.gi < b.gi;
      return a.ri < b.ri;
    });

    for (const PairCand& p : pairs) {
      if (gt_px[p.gi].matched || rc_px[p.ri].matched) continue;
      gt_px[p.gi].matched = true;
      rc_px[p.ri].matched = true;
      if (foreground(gt_px[p.gi].row, m))
        ++counts.detected;
      else
        ++counts.interpolated;
      ++counts.separation_histogram[rc_px[p.ri].row - gt_px[p.gi].row];
    }
    for (const ColumnPixel& g : gt_px) {
      if (g.matched) continue;
      if (foreground(g.row, m))
        ++counts.missed_detection;
      else
        ++counts.missed_interpolation;
    }
    for (const ColumnPixel& r : rc_px) {
      if (r.matched) continue;
      if (foreground(r.row, m))
        ++counts.false_detection;
      else
        ++counts.false_interpolation;
    }
  }
  return counts;
}

EvalReport compute_report(const EvalCounts& counts, int vertical_tol) {
  EvalReport report;
  report.counts = counts;
  report.vertical_tol = vertical_tol;
  const std::uint64_t gt_total = counts.ground_truth_total();
  const std::uint64_t slp = counts.staff_line_pixels();
  if (gt_total == 0) {
    report.percentages_defined = false;
    return report;
  }
  report.percentages_defined = true;
  const double gt_d = static_cast<double>(gt_total);
  report.staff_line_pixels_pct = 100.0 * static_cast<double>(slp) / gt_d;
  report.correct_reconstructed_pct = 100.0 * static_cast<double>(counts.correct_reconstructed()) / gt_d;
  report.detected_pct = 100.0 * static_cast<double>(counts.detected) / gt_d;
  report.interpolated_pct = 100.0 * static_cast<double>(counts.interpolated) / gt_d;
  report.missed_detection_pct = 100.0 * static_cast<double>(counts.missed_detection) / gt_d;
  report.missed_interpolation_pct = 100.0 * static_cast<double>(counts.missed_interpolation) / gt_d;
  if (slp > 0) {
    report.false_detection_pct = 100.0 * static_cast<double>(counts.false_detection) / static_cast<double>(slp);
    report.false_interpolation_pct =
        100.0 * static_cast<double>(counts.false_interpolation) / static_cast<double>(slp);
  }
  return report;
}

std::string format_percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

}  // namespace staffrec
