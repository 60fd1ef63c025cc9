#pragma once

#include <utility>
#include <vector>

#include "staffrec/errors.hpp"

namespace staffrec {

struct SmoothingParams {
  double p = 1e-4;  // weight on the data term; (1 - p) weighs the curvature term
};

/// One real-valued row position per integer column of [col_start, col_end].
struct Curve {
  int col_start = 0;
  int col_end = 0;
  std::vector<double> values;
};

/// Minimizer of  p * sum (g - s)^2 + (1 - p) * sum (s'' )^2,  with the second
/// derivative taken as the second difference s(m-1) - 2 s(m) + s(m+1) on the
/// integer grid and free ends. Solved directly through the banded SPD normal
/// system (p I + (1-p) D^T D) s = p g, so affine inputs come back unchanged.
/// Fewer than 3 samples are returned as-is.
std::vector<double> smooth_curve(const std::vector<double>& samples,
                                 const SmoothingParams& params);

/// Round half away from zero, per element.
std::vector<int> round_curve(const std::vector<double>& curve);

/// Natural cubic spline through the control points (strictly increasing
/// columns), evaluated at every integer column of [col_start, col_end].
/// Outside the control span the curve continues linearly with the boundary
/// slope.
Curve interp_spline(const std::vector<std::pair<double, double>>& control_points,
                    int col_start, int col_end);

/// Spline evaluation at one abscissa; same extension rule as interp_spline.
class NaturalSpline {
 public:
  explicit NaturalSpline(const std::vector<std::pair<double, double>>& control_points);

  double operator()(double x) const;

 private:
  std::vector<double> xs_, ys_, second_;  // knot second derivatives
};

}  // namespace staffrec
