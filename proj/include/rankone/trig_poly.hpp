#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace rankone {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to [0, 2π).
double wrap_angle(double theta);

/// Shortest distance between two angles on the circle, in [0, π].
double circle_distance(double a, double b);

/// f(θ) = c0 + Σ_k a_k cos kθ + b_k sin kθ, k = 1, 2, ...
struct TrigPoly {
  double c0 = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  static TrigPoly constant(double c) { return TrigPoly{c, {}, {}}; }
  /// c + sin θ; the building block of the sine family.
  static TrigPoly shifted_sine(double c) { return TrigPoly{c, {}, {1.0}}; }

  double value(double theta) const { return derivative(theta, 0); }
  /// order-th derivative, order in 0..3.
  double derivative(double theta, int order) const;

  bool is_constant() const;
  /// Minimum over an n-point uniform grid of [0, 2π).
  double grid_min(int n = 4096) const;

  friend bool operator==(const TrigPoly&, const TrigPoly&) = default;
};

/// P(s) = Σ_{k≥1} c_k s^k, so P(0) = 0. coeffs[0] is c_1.
struct Polynomial {
  std::vector<double> coeffs;

  double value(double s) const;
  double derivative(double s) const;
  /// Minimum over an n-point uniform grid of [lo, hi].
  double grid_min(double lo, double hi, int n = 4096) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;
};

/// Additive function of (x, s) with s = y - 1: f = fx(x) + fy(s).
struct XYFunction {
  TrigPoly x;
  Polynomial y;

  double value(double xv, double s) const { return x.value(xv) + y.value(s); }
  double dx(double xv) const { return x.derivative(xv, 1); }
  double ds(double s) const { return y.derivative(s); }

  friend bool operator==(const XYFunction&, const XYFunction&) = default;
};

/// Additive function of (x, s, t): f = fx(x) + fy(s) + ft(t).
struct XYTFunction {
  TrigPoly x;
  Polynomial y;
  TrigPoly t;

  double value(double xv, double s, double tv) const {
    return x.value(xv) + y.value(s) + t.value(tv);
  }
  double dx(double xv) const { return x.derivative(xv, 1); }
  double ds(double s) const { return y.derivative(s); }
  double dt(double tv) const { return t.derivative(tv, 1); }

  friend bool operator==(const XYTFunction&, const XYTFunction&) = default;
};

struct LogCriticalPoint {
  double x;
  /// (ln f)'' at x.
  double second_derivative;
};

/// Roots of (ln f)' = f'/f in [0, 2π): sign changes on a grid_n-point grid,
/// refined by bisection to tol. f must be positive.
std::vector<LogCriticalPoint> log_critical_points(const TrigPoly& f, int grid_n = 4096,
                                                  double tol = 1e-10);

/// sup over the circle of |f'/f|: dense grid, then golden-section refinement
/// of every grid local maximum to tol.
double sup_abs_log_derivative(const TrigPoly& f, int grid_n = 8192, double tol = 1e-10);

/// Golden-section search for a maximum of fn on [lo, hi].
template <class Fn>
double golden_max(Fn&& fn, double lo, double hi, double tol, double* arg = nullptr) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  const double xm = 0.5 * (a + b);
  if (arg) *arg = xm;
  return fn(xm);
}

}  // namespace rankone
