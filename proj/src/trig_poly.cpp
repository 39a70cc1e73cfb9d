#include "rankone/trig_poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rankone/errors.hpp"

namespace rankone {

LogDomainError::LogDomainError(const std::string& where, double value)
    : NumericalError(fmt::format("log domain: {} = {:.17g} <= 0", where, value)),
      value_(value) {}

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative can round up to exactly 2π.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double circle_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

double TrigPoly::derivative(double theta, int order) const {
  double acc = order == 0 ? c0 : 0.0;
  const std::size_t n = std::max(cos_coeffs.size(), sin_coeffs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(i + 1);
    const double a = i < cos_coeffs.size() ? cos_coeffs[i] : 0.0;
    const double b = i < sin_coeffs.size() ? sin_coeffs[i] : 0.0;
    if (a == 0.0 && b == 0.0) continue;
    const double c = std::cos(k * theta);
    const double s = std::sin(k * theta);
    // d/dθ cycles (cos, sin) -> (-sin, cos) -> (-cos, -sin) -> (sin, -cos).
    double term = 0.0;
    switch (order) {
      case 0: term = a * c + b * s; break;
      case 1: term = k * (-a * s + b * c); break;
      case 2: term = k * k * (-a * c - b * s); break;
      case 3: term = k * k * k * (a * s - b * c); break;
      default: term = std::numeric_limits<double>::quiet_NaN();
    }
    acc += term;
  }
  return acc;
}

bool TrigPoly::is_constant() const {
  auto zero = [](double v) { return v == 0.0; };
  return std::all_of(cos_coeffs.begin(), cos_coeffs.end(), zero) &&
         std::all_of(sin_coeffs.begin(), sin_coeffs.end(), zero);
}

double TrigPoly::grid_min(int n) const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) m = std::min(m, value(kTwoPi * i / n));
  return m;
}

double Polynomial::value(double s) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (acc + *it) * s;
  return acc;
}

double Polynomial::derivative(double s) const {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * s + static_cast<double>(k + 1) * coeffs[k];
  return acc;
}

double Polynomial::grid_min(double lo, double hi, int n) const {
  if (coeffs.empty()) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double s = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    m = std::min(m, value(s));
  }
  return m;
}

std::vector<LogCriticalPoint> log_critical_points(const TrigPoly& f, int grid_n, double tol) {
  auto dlog = [&f](double x) { return f.derivative(x, 1) / f.value(x); };
  auto d2log = [&f](double x) {
    const double v = f.value(x), d1 = f.derivative(x, 1), d2 = f.derivative(x, 2);
    return (d2 * v - d1 * d1) / (v * v);
  };

  std::vector<LogCriticalPoint> out;
  if (f.is_constant()) return out;

  double x0 = 0.0;
  double v0 = dlog(x0);
  for (int i = 1; i <= grid_n; ++i) {
    const double x1 = kTwoPi * i / grid_n;
    const double v1 = dlog(x1);
    if (v0 == 0.0) {
      out.push_back({x0, d2log(x0)});
    } else if (v0 * v1 < 0.0) {
      double a = x0, b = x1, fa = v0;
      while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = dlog(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fa < 0.0) == (fm < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double r = wrap_angle(0.5 * (a + b));
      out.push_back({r, d2log(r)});
    }
    x0 = x1;
    v0 = v1;
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.x < b.x; });
  return out;
}

double sup_abs_log_derivative(const TrigPoly& f, int grid_n, double tol) {
  auto g = [&f](double t) { return std::abs(f.derivative(t, 1) / f.value(t)); };
  std::vector<double> v(grid_n);
  for (int i = 0; i < grid_n; ++i) v[i] = g(kTwoPi * i / grid_n);
  double best = *std::max_element(v.begin(), v.end());
  const double h = kTwoPi / grid_n;
  for (int i = 0; i < grid_n; ++i) {
    const double prev = v[(i + grid_n - 1) % grid_n];
    const double next = v[(i + 1) % grid_n];
    if (v[i] >= prev && v[i] >= next && v[i] > 0.0) {
      const double c = kTwoPi * i / grid_n;
      best = std::max(best, golden_max(g, c - h, c + h, tol));
    }
  }
  return best;
}

}  // namespace rankone
