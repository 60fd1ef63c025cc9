#include "staffrec/evaluation.hpp"

#include <doctest.h>

#include <random>

using namespace staffrec;

namespace {

/// A one-staff reconstruction whose four lines are flat rows.
std::vector<ReconstructedStaff> flat_recon(const std::array<int, 4>& rows, int col_start,
                                           int col_end, int thickness = 10) {
  ReconstructedStaff staff;
  staff.col_start = col_start;
  staff.col_end = col_end;
  staff.thickness = thickness;
  staff.mean_sep = 60.0;
  for (int i = 0; i < 4; ++i) {
    staff.lines[static_cast<std::size_t>(i)].assign(
        static_cast<std::size_t>(col_end - col_start + 1), rows[static_cast<std::size_t>(i)]);
    staff.status[static_cast<std::size_t>(i)].assign(
        static_cast<std::size_t>(col_end - col_start + 1), {TrackState::Detected, 0});
  }
  return {staff};
}

GroundTruth flat_gt(const std::array<int, 4>& rows, int col_start, int col_end, int image_rows,
                    int image_cols) {
  std::vector<std::array<std::vector<std::pair<double, double>>, 4>> cps(1);
  for (int i = 0; i < 4; ++i)
    cps[0][static_cast<std::size_t>(i)] = {
        {static_cast<double>(col_start), static_cast<double>(rows[static_cast<std::size_t>(i)])},
        {static_cast<double>(col_end), static_cast<double>(rows[static_cast<std::size_t>(i)])}};
  return rasterize_ground_truth(cps, image_rows, image_cols);
}

}  // namespace

TEST_SUITE_BEGIN("evaluation");

TEST_CASE("reference rasterization") {
  SUBCASE("a two point horizontal line covers one pixel per column") {
    const GroundTruth gt = flat_gt({100, 160, 220, 280}, 0, 999, 400, 1000);
    CHECK(gt.total_pixels() == 4000);
    const auto& line = gt.staves[0].lines[0];
    CHECK(line.col_start == 0);
    CHECK(line.col_end == 999);
    for (int r : line.rows) CHECK(r == 100);
  }
  SUBCASE("crossing lines are rejected") {
    std::vector<std::array<std::vector<std::pair<double, double>>, 4>> cps(1);
    cps[0][0] = {{0.0, 100.0}, {99.0, 100.0}};
    cps[0][1] = {{0.0, 160.0}, {99.0, 90.0}};  // dives above line 0
    cps[0][2] = {{0.0, 220.0}, {99.0, 220.0}};
    cps[0][3] = {{0.0, 280.0}, {99.0, 280.0}};
    CHECK_THROWS_AS(rasterize_ground_truth(cps, 400, 100), contract_violation);
  }
}

TEST_CASE("classification follows the truth table") {
  const std::array<int, 4> rows{100, 160, 220, 280};
  const int cols = 50;
  const auto recon = flat_recon(rows, 0, cols - 1);
  const GroundTruth gt = flat_gt(rows, 0, cols - 1, 400, cols);

  SUBCASE("foreground at the reference pixel counts as detection") {
    BinaryRaster binary(400, cols);
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < cols; ++c) binary.set(rows[static_cast<std::size_t>(i)], c, true);
    const EvalCounts counts = classify_pixels(recon, gt, binary, EvalParams{10});
    CHECK(counts.detected == 4u * cols);
    CHECK(counts.interpolated == 0);
    CHECK(counts.false_detection == 0);
    CHECK(counts.missed_detection == 0);
  }
  SUBCASE("background at the reference pixel counts as interpolation") {
    const BinaryRaster binary(400, cols);
    const EvalCounts counts = classify_pixels(recon, gt, binary, EvalParams{10});
    CHECK(counts.interpolated == 4u * cols);
    CHECK(counts.detected == 0);
  }
  SUBCASE("a 3 row offset inside the tolerance matches as interpolation") {
    const auto shifted = flat_recon({103, 163, 223, 283}, 0, cols - 1);
    const BinaryRaster binary(400, cols);  // background page: a gap region
    const EvalCounts counts = classify_pixels(shifted, gt, binary, EvalParams{10});
    CHECK(counts.interpolated == 4u * cols);
    CHECK(counts.separation_histogram.at(3) == 4u * cols);
    CHECK(counts.separation_histogram.size() == 1);
  }
  SUBCASE("outside the tolerance the reference pixel is missed") {
    const auto shifted = flat_recon({120, 180, 240, 300}, 0, cols - 1);
    BinaryRaster binary(400, cols);
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < cols; ++c) binary.set(rows[static_cast<std::size_t>(i)], c, true);
    const EvalCounts counts = classify_pixels(shifted, gt, binary, EvalParams{10});
    CHECK(counts.missed_detection == 4u * cols);   // reference on ink, unmatched
    CHECK(counts.false_interpolation == 4u * cols);  // recon on background, unmatched
    CHECK(counts.detected == 0);
  }
  SUBCASE("false detections sit on ink with no reference nearby") {
    const auto shifted = flat_recon({120, 180, 240, 300}, 0, cols - 1);
    BinaryRaster binary(400, cols);
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < cols; ++c) {
        binary.set(rows[static_cast<std::size_t>(i)], c, true);       // reference ink
        binary.set(rows[static_cast<std::size_t>(i)] + 20, c, true);  // clutter under recon
      }
    const EvalCounts counts = classify_pixels(shifted, gt, binary, EvalParams{10});
    CHECK(counts.false_detection == 4u * cols);
    CHECK(counts.missed_detection == 4u * cols);
  }
}

TEST_CASE("accounting identities hold on random scenes") {
  std::mt19937 rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const int cols = 40 + static_cast<int>(rng() % 60);
    std::array<int, 4> gt_rows{}, rc_rows{};
    for (int i = 0; i < 4; ++i) {
      gt_rows[static_cast<std::size_t>(i)] = 60 + 70 * i + static_cast<int>(rng() % 9) - 4;
      rc_rows[static_cast<std::size_t>(i)] =
          gt_rows[static_cast<std::size_t>(i)] + static_cast<int>(rng() % 31) - 15;
    }
    std::sort(rc_rows.begin(), rc_rows.end());
    // Reconstruction wider than the reference: extra columns become false
    // detections or interpolations.
    const auto recon = flat_recon(rc_rows, 0, cols + 19);
    const GroundTruth gt = flat_gt(gt_rows, 10, cols - 1, 400, cols + 20);
    BinaryRaster binary(400, cols + 20);
    for (int r = 0; r < binary.rows; ++r)
      for (int c = 0; c < binary.cols; ++c) binary.set(r, c, rng() % 3 == 0);

    const EvalParams params{1 + static_cast<int>(rng() % 12)};
    const EvalCounts counts = classify_pixels(recon, gt, binary, params);

    CHECK(counts.ground_truth_total() == gt.total_pixels());
    CHECK(counts.staff_line_pixels() ==
          4u * static_cast<std::uint64_t>(cols + 20));  // all recon pixels accounted
    std::uint64_t hist_total = 0;
    for (const auto& [offset, count] : counts.separation_histogram) {
      CHECK(std::abs(offset) <= params.vertical_tol);
      hist_total += count;
    }
    CHECK(hist_total == counts.correct_reconstructed());
  }
}

TEST_CASE("raising the tolerance never loses matches") {
  std::mt19937 rng(57);
  for (int trial = 0; trial < 10; ++trial) {
    std::array<int, 4> gt_rows{80, 150, 220, 290}, rc_rows{};
    for (int i = 0; i < 4; ++i)
      rc_rows[static_cast<std::size_t>(i)] =
          gt_rows[static_cast<std::size_t>(i)] + static_cast<int>(rng() % 19) - 9;
    std::sort(rc_rows.begin(), rc_rows.end());
    const auto recon = flat_recon(rc_rows, 0, 49);
    const GroundTruth gt = flat_gt(gt_rows, 0, 49, 400, 50);
    BinaryRaster binary(400, 50);
    for (int r = 0; r < 400; ++r)
      for (int c = 0; c < 50; ++c) binary.set(r, c, rng() % 2 == 0);

    std::uint64_t prev = 0;
    for (int tol : {1, 3, 6, 10, 15}) {
      const EvalCounts counts = classify_pixels(recon, gt, binary, EvalParams{tol});
      CHECK(counts.correct_reconstructed() >= prev);
      prev = counts.correct_reconstructed();
    }
  }
}

TEST_CASE("classification is invariant under vertical translation") {
  const std::array<int, 4> gt_rows{90, 150, 210, 270};
  const std::array<int, 4> rc_rows{91, 149, 212, 270};
  BinaryRaster binary(400, 30);
  std::mt19937 rng(59);
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 30; ++c)
      if (rng() % 2) binary.set(gt_rows[static_cast<std::size_t>(i)], c, true);

  const EvalCounts base = classify_pixels(flat_recon(rc_rows, 0, 29),
                                          flat_gt(gt_rows, 0, 29, 400, 30), binary,
                                          EvalParams{5});

  const int shift = 40;
  std::array<int, 4> gt_shift{}, rc_shift{};
  for (int i = 0; i < 4; ++i) {
    gt_shift[static_cast<std::size_t>(i)] = gt_rows[static_cast<std::size_t>(i)] + shift;
    rc_shift[static_cast<std::size_t>(i)] = rc_rows[static_cast<std::size_t>(i)] + shift;
  }
  BinaryRaster shifted(400, 30);
  for (int r = 0; r < 400 - shift; ++r)
    for (int c = 0; c < 30; ++c)
      if (binary.at(r, c)) shifted.set(r + shift, c, true);

  const EvalCounts moved = classify_pixels(flat_recon(rc_shift, 0, 29),
                                           flat_gt(gt_shift, 0, 29, 400, 30), shifted,
                                           EvalParams{5});
  CHECK(base.detected == moved.detected);
  CHECK(base.interpolated == moved.interpolated);
  CHECK(base.missed_detection == moved.missed_detection);
  CHECK(base.separation_histogram == moved.separation_histogram);
}

TEST_CASE("report percentages reproduce the published scoreboard") {
  EvalCounts counts;
  counts.detected = 597173;
  counts.interpolated = 50960;
  counts.missed_detection = 14389;
  counts.missed_interpolation = 1903;
  counts.false_detection = 1678;
  counts.false_interpolation = 2029;

  CHECK(counts.ground_truth_total() == 664425);
  CHECK(counts.staff_line_pixels() == 651840);
  CHECK(counts.correct_reconstructed() == 648133);

  const EvalReport report = compute_report(counts, 10);
  REQUIRE(report.percentages_defined);
  CHECK(format_percent(report.correct_reconstructed_pct) == "97.55");
  CHECK(format_percent(report.detected_pct) == "89.88");
  CHECK(format_percent(report.interpolated_pct) == "7.67");
  CHECK(format_percent(report.missed_detection_pct) == "2.17");
  CHECK(format_percent(report.missed_interpolation_pct) == "0.29");
  CHECK(format_percent(report.false_detection_pct) == "0.26");
  CHECK(format_percent(report.false_interpolation_pct) == "0.31");
  // 651840 / 664425 lands at 98.106%, which renders as 98.11.
  CHECK(format_percent(report.staff_line_pixels_pct) == "98.11");
}

TEST_CASE("an empty reference flags the report as undefined") {
  EvalCounts counts;
  counts.false_interpolation = 12;
  const EvalReport report = compute_report(counts, 3);
  CHECK(!report.percentages_defined);
}

TEST_CASE("the tolerance defaults to the mean estimated thickness") {
  auto staves = flat_recon({100, 160, 220, 280}, 0, 9, 9);
  auto more = flat_recon({100, 160, 220, 280}, 0, 9, 12);
  staves.push_back(more[0]);
  CHECK(effective_vertical_tol(staves, EvalParams{}) == 11);  // round(10.5) away from zero
  CHECK(effective_vertical_tol(staves, EvalParams{4}) == 4);  // explicit override wins
  CHECK(effective_vertical_tol({}, EvalParams{}) == 1);
}

TEST_SUITE_END();
