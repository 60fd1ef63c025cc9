#include "staffrec/spline.hpp"

#include <algorithm>
#include <cmath>

namespace staffrec {

namespace {

// Symmetric positive definite pentadiagonal solve via banded Cholesky.
// diag/off1/off2 hold the main, first and second diagonals of A.
std::vector<double> solve_penta(std::vector<double> diag, std::vector<double> off1,
                                std::vector<double> off2, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  // A = L D L^T with unit lower triangular L banded to width 2.
  std::vector<double> d(n), l1(n, 0.0), l2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double di = diag[i];
    if (i >= 1) di -= l1[i - 1] * l1[i - 1] * d[i - 1];
    if (i >= 2) di -= l2[i - 2] * l2[i - 2] * d[i - 2];
    d[i] = di;
    if (i + 1 < n) {
      double e = off1[i];
      if (i >= 1) e -= l1[i - 1] * l2[i - 1] * d[i - 1];
      l1[i] = e / di;
    }
    if (i + 2 < n) l2[i] = off2[i] / di;
  }
  // Forward: L y = rhs
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 1) rhs[i] -= l1[i - 1] * rhs[i - 1];
    if (i >= 2) rhs[i] -= l2[i - 2] * rhs[i - 2];
  }
  // Diagonal + backward: L^T x = D^{-1} y
  for (std::size_t i = 0; i < n; ++i) rhs[i] /= d[i];
  for (std::size_t ii = n; ii-- > 0;) {
    if (ii + 1 < n) rhs[ii] -= l1[ii] * rhs[ii + 1];
    if (ii + 2 < n) rhs[ii] -= l2[ii] * rhs[ii + 2];
  }
  return rhs;
}

}  // namespace

std::vector<double> smooth_curve(const std::vector<double>& samples,
                                 const SmoothingParams& params) {
  require(params.p > 0.0 && params.p < 1.0, "smooth_curve: p must lie in (0,1)");
  for (double v : samples)
    require(std::isfinite(v), "smooth_curve: samples must be finite");
  const std::size_t n = samples.size();
  if (n < 3) return samples;

  const double p = params.p, q = 1.0 - params.p;

  // A = p I + (1-p) D^T D with D the (n-2) x n second-difference operator.
  // Row m of D^T D touches columns m-2 .. m+2.
  std::vector<double> diag(n, p), off1(n, 0.0), off2(n, 0.0), rhs(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    // D row k has entries (1, -2, 1) at columns k, k+1, k+2.
    diag[k] += q;
    diag[k + 1] += 4.0 * q;
    diag[k + 2] += q;
    off1[k] += -2.0 * q;
    off1[k + 1] += -2.0 * q;
    off2[k] += q;
  }
  for (std::size_t i = 0; i < n; ++i) rhs[i] = p * samples[i];
  return solve_penta(std::move(diag), std::move(off1), std::move(off2), std::move(rhs));
}

std::vector<int> round_curve(const std::vector<double>& curve) {
  std::vector<int> out(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i)
    out[i] = static_cast<int>(std::lround(curve[i]));
  return out;
}

NaturalSpline::NaturalSpline(const std::vector<std::pair<double, double>>& control_points) {
  require(control_points.size() >= 2, "interp_spline: need at least 2 control points");
  const std::size_t n = control_points.size();
  xs_.resize(n);
  ys_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs_[i] = control_points[i].first;
    ys_[i] = control_points[i].second;
    if (i > 0)
      require(xs_[i] > xs_[i - 1], "interp_spline: control columns must be strictly increasing");
  }

  // Tridiagonal system for the knot second derivatives, natural ends.
  second_.assign(n, 0.0);
  if (n > 2) {
    const std::size_t m = n - 2;
    std::vector<double> a(m), b(m), c(m), r(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double h0 = xs_[i + 1] - xs_[i];
      const double h1 = xs_[i + 2] - xs_[i + 1];
      a[i] = h0;
      b[i] = 2.0 * (h0 + h1);
      c[i] = h1;
      r[i] = 6.0 * ((ys_[i + 2] - ys_[i + 1]) / h1 - (ys_[i + 1] - ys_[i]) / h0);
    }
    for (std::size_t i = 1; i < m; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    second_[m] = r[m - 1] / b[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) second_[i + 1] = (r[i] - c[i] * second_[i + 2]) / b[i];
  }
}

double NaturalSpline::operator()(double x) const {
  const std::size_t n = xs_.size();
  if (x <= xs_.front()) {
    const double h = xs_[1] - xs_[0];
    const double slope = (ys_[1] - ys_[0]) / h - h / 6.0 * (2.0 * second_[0] + second_[1]);
    return ys_.front() + slope * (x - xs_.front());
  }
  if (x >= xs_.back()) {
    const double h = xs_[n - 1] - xs_[n - 2];
    const double slope =
        (ys_[n - 1] - ys_[n - 2]) / h + h / 6.0 * (second_[n - 2] + 2.0 * second_[n - 1]);
    return ys_.back() + slope * (x - xs_.back());
  }
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const double h = xs_[i + 1] - xs_[i];
  const double t0 = (xs_[i + 1] - x) / h, t1 = (x - xs_[i]) / h;
  return t0 * ys_[i] + t1 * ys_[i + 1] +
         ((t0 * t0 * t0 - t0) * second_[i] + (t1 * t1 * t1 - t1) * second_[i + 1]) * h * h / 6.0;
}

Curve interp_spline(const std::vector<std::pair<double, double>>& control_points, int col_start,
                    int col_end) {
  require(col_end >= col_start, "interp_spline: empty column range");
  const NaturalSpline s(control_points);
  Curve out;
  out.col_start = col_start;
  out.col_end = col_end;
  out.values.resize(static_cast<std::size_t>(col_end - col_start + 1));
  for (int m = col_start; m <= col_end; ++m)
    out.values[static_cast<std::size_t>(m - col_start)] = s(static_cast<double>(m));
  return out;
}

}  // namespace staffrec
