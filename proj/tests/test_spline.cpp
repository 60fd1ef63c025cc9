#include "staffrec/spline.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace staffrec;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("spline");

TEST_CASE("affine sequences are fixed points") {
  const SmoothingParams params;
  std::vector<double> line(120);
  for (std::size_t i = 0; i < line.size(); ++i) line[i] = 3.25 + 0.125 * static_cast<double>(i);
  const auto out = smooth_curve(line, params);
  CHECK(max_abs_diff(out, line) < 1e-9);
  CHECK(max_abs_diff(smooth_curve(out, params), out) < 1e-9);  // idempotent on its fixed points
}

TEST_CASE("saw-tooth input flattens to the midline") {
  const SmoothingParams params;  // p = 1e-4
  std::vector<double> saw(200);
  for (std::size_t i = 0; i < saw.size(); ++i) saw[i] = (i % 2 == 0) ? 10.0 : 11.0;
  const auto out = smooth_curve(saw, params);
  for (std::size_t i = 40; i < 160; ++i) CHECK(std::abs(out[i] - 10.5) < 0.05);
  CHECK(max_abs_diff(out, oracles::smooth_dense(saw, params.p)) < 1e-6);
}

TEST_CASE("an isolated outlier is absorbed") {
  const SmoothingParams params;
  std::vector<double> flat(150, 42.0);
  flat[75] += 20.0;
  const auto out = smooth_curve(flat, params);
  CHECK(std::abs(out[75] - 42.0) < 1.0);
  CHECK(max_abs_diff(out, oracles::smooth_dense(flat, params.p)) < 1e-6);
}

TEST_CASE("matches the dense solver on random sequences") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 3 + rng() % 300;
    std::vector<double> g(n);
    for (auto& v : g) v = value(rng);
    const SmoothingParams params{trial % 2 == 0 ? 1e-4 : 0.3};
    CHECK(max_abs_diff(smooth_curve(g, params), oracles::smooth_dense(g, params.p)) < 1e-6);
  }
}

TEST_CASE("the mean is preserved") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> noise(-2.0, 2.0);
  std::vector<double> g(300, 100.0);
  double injected = 0.0;
  for (auto& v : g) {
    const double d = noise(rng);
    v += d;
    injected += d;
  }
  const auto out = smooth_curve(g, SmoothingParams{});
  double in_mean = (100.0 * 300 + injected) / 300.0, out_mean = 0.0;
  for (double v : out) out_mean += v;
  out_mean /= 300.0;
  CHECK(std::abs(out_mean - in_mean) < 1e-6);
}

TEST_CASE("short and invalid inputs") {
  const SmoothingParams params;
  CHECK(smooth_curve({5.0, 9.0}, params) == std::vector<double>{5.0, 9.0});
  CHECK(smooth_curve({}, params).empty());
  CHECK_THROWS_AS(smooth_curve({1.0, std::nan(""), 3.0}, params), contract_violation);
}

TEST_CASE("rounding is half away from zero") {
  CHECK(round_curve({10.4, 10.5, 10.6}) == std::vector<int>{10, 11, 11});
  CHECK(round_curve({7.0, -3.0}) == std::vector<int>{7, -3});
  CHECK(round_curve({-0.5, -0.4}) == std::vector<int>{-1, 0});
}

TEST_CASE("two control points interpolate linearly") {
  const Curve curve = interp_spline({{0.0, 10.0}, {10.0, 20.0}}, 0, 10);
  for (int m = 0; m <= 10; ++m)
    CHECK(curve.values[static_cast<std::size_t>(m)] == doctest::Approx(10.0 + m).epsilon(1e-12));
}

TEST_CASE("control points are reproduced exactly") {
  const std::vector<std::pair<double, double>> cps{
      {0.0, 5.0}, {13.0, 9.5}, {30.0, 3.25}, {47.0, 12.0}, {60.0, 8.0}};
  const NaturalSpline s(cps);
  for (const auto& [x, y] : cps) CHECK(s(x) == doctest::Approx(y).epsilon(1e-12));
}

TEST_CASE("linear data is reproduced everywhere, including the extension") {
  const std::vector<std::pair<double, double>> cps{
      {5.0, 7.0}, {20.0, 14.5}, {31.0, 20.0}, {58.0, 33.5}};  // y = 4.5 + 0.5 x
  const Curve curve = interp_spline(cps, 0, 70);
  for (int m = 0; m <= 70; ++m)
    CHECK(curve.values[static_cast<std::size_t>(m)] ==
          doctest::Approx(4.5 + 0.5 * m).epsilon(1e-9));
}

TEST_CASE("the interpolant is C2 at the knots") {
  // For piecewise cubics the one-sided second differences satisfy
  // e(h) = jump + h * (s'''- + s'''+) exactly, so 2 e(h/2) - e(h) isolates
  // the jump.
  const std::vector<std::pair<double, double>> cps{
      {0.0, 0.0}, {11.0, 30.0}, {23.0, -14.0}, {40.0, 25.0}, {55.0, 12.0}};
  const NaturalSpline s(cps);
  auto jump_at = [&](double x) {
    auto one_sided = [&](double h) {
      const double right = (s(x) - 2.0 * s(x + h) + s(x + 2.0 * h)) / (h * h);
      const double left = (s(x) - 2.0 * s(x - h) + s(x - 2.0 * h)) / (h * h);
      return right - left;
    };
    return 2.0 * one_sided(0.25) - one_sided(0.5);
  };
  for (std::size_t k = 1; k + 1 < cps.size(); ++k) CHECK(std::abs(jump_at(cps[k].first)) < 1e-6);
  // Natural ends: the second derivative vanishes at the boundary knots
  // (same Richardson trick, one-sided).
  auto second_at_left_end = [&](double x0) {
    auto d = [&](double h) { return (s(x0) - 2.0 * s(x0 + h) + s(x0 + 2.0 * h)) / (h * h); };
    return 2.0 * d(0.25) - d(0.5);
  };
  CHECK(std::abs(second_at_left_end(0.0)) < 1e-6);
}

TEST_CASE("each piece is a cubic and the extension is linear") {
  const std::vector<std::pair<double, double>> cps{
      {0.0, 2.0}, {10.0, 8.0}, {25.0, -3.0}, {33.0, 6.0}};
  const NaturalSpline s(cps);
  // Fourth differences vanish on a cubic piece.
  for (double x = 1.0; x < 9.0; x += 0.5) {
    const double h = 0.2;
    const double d4 =
        s(x - 2 * h) - 4 * s(x - h) + 6 * s(x) - 4 * s(x + h) + s(x + 2 * h);
    CHECK(std::abs(d4) < 1e-9);
  }
  // Outside the span the curve is a straight continuation.
  const double slope_out = (s(40.0) - s(39.0));
  CHECK(s(45.0) == doctest::Approx(s(40.0) + 5.0 * slope_out).epsilon(1e-9));
  const double slope_left = s(-1.0) - s(-2.0);
  CHECK(s(-5.0) == doctest::Approx(s(0.0) - 5.0 * slope_left).epsilon(1e-9));
}

TEST_CASE("duplicate or decreasing columns violate the contract") {
  CHECK_THROWS_AS(interp_spline({{0.0, 1.0}, {0.0, 2.0}, {5.0, 3.0}}, 0, 5), contract_violation);
  CHECK_THROWS_AS(interp_spline({{3.0, 1.0}, {1.0, 2.0}}, 0, 5), contract_violation);
  CHECK_THROWS_AS(interp_spline({{3.0, 1.0}}, 0, 5), contract_violation);
}

TEST_SUITE_END();
