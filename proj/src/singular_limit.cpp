#include "rankone/singular_limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rankone/errors.hpp"

namespace rankone {

double eps_for_level(double a, int n, double delta1) {
  return std::exp((a - 2.0 * n * std::numbers::pi) / delta1);
}

double eps_for_level_negated(double a, int n, double delta1) {
  return std::exp(-(a + 2.0 * n * std::numbers::pi) / delta1);
}

Vec2 eval_rescaled_map(const ModelParams& p, const ModelFunctions& f, double x, double ybar,
                       double t_frozen) {
  const double e = p.eps1;
  if (!(e > 0.0)) throw InputError("eval_rescaled_map needs eps1 > 0");
  const double s = e * ybar;
  const double arg = ybar + f.psi2.value(x, s) + p.eps2 * f.psi4.value(x, s, t_frozen);
  if (!(arg > 0.0)) throw LogDomainError("ybar+psi2+eps2*psi4", arg);
  const double base = ybar + f.g.value(x, s);
  if (base < 0.0) throw LogDomainError("ybar+g", base);
  const double xn = x + p.alpha1 + e * f.psi1.value(x, s) + p.delta1 * std::log(e) +
                    p.delta1 * std::log(arg);
  return {wrap_angle(xn), std::pow(e, p.delta - 1.0) * std::pow(base, p.delta)};
}

Vec2 eval_rescaled_on_sequence(const ModelParams& p, const ModelFunctions& f, double a,
                               double eps, double x, double ybar) {
  const double s = eps * ybar;
  const double arg = ybar + f.psi2.value(x, s);
  if (!(arg > 0.0)) throw LogDomainError("ybar+psi2", arg);
  const double base = ybar + f.g.value(x, s);
  if (base < 0.0) throw LogDomainError("ybar+g", base);
  const double xn = x + p.alpha1 + eps * f.psi1.value(x, s) + a + p.delta1 * std::log(arg);
  const double yn = eps == 0.0 ? 0.0 : std::pow(eps, p.delta - 1.0) * std::pow(base, p.delta);
  return {wrap_angle(xn), yn};
}

LimitFamily LimitFamily::from(const ModelParams& p, const ModelFunctions& f, double a) {
  return {a, p.alpha1, p.delta1, f.psi2};
}

double LimitFamily::lift(double x) const {
  return x + alpha1 + a + delta1 * std::log(psi2.value(x, 0.0));
}

double LimitFamily::derivative(double x) const {
  return 1.0 + delta1 * psi2.dx(x) / psi2.value(x, 0.0);
}

double LimitFamily::second_derivative(double x) const {
  const double v = psi2.value(x, 0.0), d1 = psi2.dx(x), d2 = psi2.x.derivative(x, 2);
  return delta1 * (d2 * v - d1 * d1) / (v * v);
}

double LimitFamily::lift2d(double x, double ybar) const {
  return x + alpha1 + a + delta1 * std::log(ybar + psi2.value(x, 0.0));
}

double eval_limit_map(const LimitFamily& fam, double x) { return fam(x); }

ConvergenceRow convergence_row(const ModelParams& p, const ModelFunctions& f, double a, int n,
                               double eps, const ConvergenceGrid& grid) {
  const LimitFamily fam = LimitFamily::from(p, f, a);
  ConvergenceRow row{n, eps, 0.0, 0.0};
  const double d = p.delta;
  for (int i = 0; i < grid.nx; ++i) {
    const double x = kTwoPi * i / grid.nx;
    for (int j = 0; j < grid.ny; ++j) {
      const double yb = grid.ny == 1 ? 0.0 : grid.ybar_max * j / (grid.ny - 1);
      const double s = eps * yb;
      const Vec2 img = eval_rescaled_on_sequence(p, f, a, eps, x, yb);

      const double c0 = circle_distance(img.x(), fam.lift2d(x, yb)) + std::abs(img.y());

      const double arg = yb + f.psi2.value(x, s);
      const double arg0 = yb + f.psi2.value(x, 0.0);
      const double dXdx = 1.0 + eps * f.psi1.dx(x) + p.delta1 * f.psi2.dx(x) / arg;
      const double dXdy = eps * eps * f.psi1.ds(s) + p.delta1 * (1.0 + eps * f.psi2.ds(s)) / arg;
      const double dHdx = 1.0 + p.delta1 * f.psi2.dx(x) / arg0;
      const double dHdy = p.delta1 / arg0;
      double dYdx = 0.0, dYdy = 0.0;
      if (eps > 0.0) {
        const double base = yb + f.g.value(x, s);
        const double k = std::pow(eps, d - 1.0) * d * std::pow(base, d - 1.0);
        dYdx = k * f.g.dx(x);
        dYdy = k * (1.0 + eps * f.g.ds(s));
      }
      const double c1 = c0 + std::abs(dXdx - dHdx) + std::abs(dXdy - dHdy) + std::abs(dYdx) +
                        std::abs(dYdy);
      row.c0_sup = std::max(row.c0_sup, c0);
      row.c1_sup = std::max(row.c1_sup, c1);
    }
  }
  return row;
}

std::vector<ConvergenceRow> convergence_table(const ModelParams& p, const ModelFunctions& f,
                                              double a, int n_lo, int n_hi,
                                              const ConvergenceGrid& grid) {
  std::vector<ConvergenceRow> rows;
  for (int n = n_lo; n <= n_hi; ++n)
    rows.push_back(convergence_row(p, f, a, n, eps_for_level(a, n, p.delta1), grid));
  return rows;
}

std::vector<LogCriticalPoint> critical_points(const LimitFamily& fam) {
  auto cps = log_critical_points(fam.psi2.x);
  for (const auto& c : cps)
    if (std::abs(c.second_derivative) < 1e-8)
      throw DegenerateCritical(fmt::format("ln psi2(x,0) has a degenerate critical point at x={:.12g} "
                                           "(second derivative {:.3g})",
                                           c.x, c.second_derivative));
  return cps;
}

std::vector<double> limit_critical_set(const LimitFamily& fam, int grid_n) {
  std::vector<double> out;
  double x0 = 0.0, v0 = fam.derivative(0.0);
  for (int i = 1; i <= grid_n; ++i) {
    const double x1 = kTwoPi * i / grid_n;
    const double v1 = fam.derivative(x1);
    if (v0 == 0.0) {
      out.push_back(x0);
    } else if (v0 * v1 < 0.0) {
      double lo = x0, hi = x1, flo = v0;
      while (hi - lo > 1e-13) {
        const double m = 0.5 * (lo + hi);
        const double fm = fam.derivative(m);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = m;
          flo = fm;
        } else {
          hi = m;
        }
      }
      out.push_back(wrap_angle(0.5 * (lo + hi)));
    }
    x0 = x1;
    v0 = v1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool positive(const std::vector<std::vector<int>>& m) {
  for (const auto& row : m)
    for (int v : row)
      if (v == 0) return false;
  return true;
}

std::vector<std::vector<int>> bool_product(const std::vector<std::vector<int>>& a,
                                           const std::vector<std::vector<int>>& b) {
  const std::size_t r = a.size();
  std::vector<std::vector<int>> c(r, std::vector<int>(r, 0));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < r; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < r; ++j)
          if (b[k][j]) c[i][j] = 1;
  return c;
}

}  // namespace

TransitionStructure transition_structure(const LimitFamily& fam) {
  constexpr double slack = 1e-9;
  TransitionStructure ts;
  const std::vector<double> c = limit_critical_set(fam);
  if (c.empty()) {
    ts.intervals.push_back({0.0, kTwoPi, 0.0, 0.0});
  } else {
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double lo = c[i];
      const double hi = i + 1 < c.size() ? c[i + 1] : c[0] + kTwoPi;
      ts.intervals.push_back({lo, hi, 0.0, 0.0});
    }
  }
  for (auto& J : ts.intervals) {
    const double a = fam.lift(J.lo), b = fam.lift(J.hi);
    J.image_lo = std::min(a, b);
    J.image_hi = std::max(a, b);
  }

  const std::size_t r = ts.intervals.size();
  ts.q.assign(r, std::vector<int>(r, 0));
  for (std::size_t i = 0; i < r; ++i) {
    const auto& img = ts.intervals[i];
    const bool covers = img.image_hi - img.image_lo >= kTwoPi - slack;
    for (std::size_t m = 0; m < r; ++m) {
      const auto& J = ts.intervals[m];
      if (covers) {
        ts.q[i][m] = 1;
        continue;
      }
      // Translate J_m by the multiple of 2π that puts its left end at or
      // just above the image's left end.
      const double k = std::ceil((img.image_lo - slack - J.lo) / kTwoPi);
      const double lo = J.lo + k * kTwoPi, hi = J.hi + k * kTwoPi;
      ts.q[i][m] = (lo >= img.image_lo - slack && hi <= img.image_hi + slack) ? 1 : 0;
    }
  }

  auto power = ts.q;
  for (int p = 1; p <= 16; ++p) {
    if (positive(power)) {
      ts.mixing_power = p;
      break;
    }
    power = bool_product(power, ts.q);
  }
  return ts;
}

MisiurewiczReport misiurewicz_report(const LimitFamily& fam, double delta0, int horizon,
                                     int samples) {
  MisiurewiczReport rep;
  rep.delta0 = delta0;
  rep.horizon = horizon;
  rep.samples = samples;
  rep.critical_set = limit_critical_set(fam);
  for (double c : rep.critical_set) rep.abs_h2.push_back(std::abs(fam.second_derivative(c)));

  const auto& C = rep.critical_set;
  auto dist_to_c = [&](double x) {
    double d = std::numeric_limits<double>::infinity();
    for (double c : C) d = std::min(d, circle_distance(x, c));
    return d;
  };

  // (1a)
  rep.min_abs_h2_near_critical = std::numeric_limits<double>::infinity();
  for (double c : C)
    for (int i = 0; i <= 400; ++i) {
      const double x = c - delta0 + 2.0 * delta0 * i / 400;
      rep.min_abs_h2_near_critical = std::min(rep.min_abs_h2_near_critical, std::abs(fam.second_derivative(x)));
    }
  rep.cond_1a = rep.min_abs_h2_near_critical > 0.0;

  // (1b)
  rep.min_critical_return = std::numeric_limits<double>::infinity();
  for (double c : C) {
    double x = c;
    for (int n = 1; n <= horizon; ++n) {
      x = fam(x);
      rep.min_critical_return = std::min(rep.min_critical_return, dist_to_c(x));
    }
  }
  rep.cond_1b = rep.min_critical_return >= delta0;

  rep.min_abs_derivative_outside = std::numeric_limits<double>::infinity();
  const int fine = 1 << 16;
  for (int i = 0; i < fine; ++i) {
    const double x = kTwoPi * i / fine;
    if (dist_to_c(x) >= delta0)
      rep.min_abs_derivative_outside = std::min(rep.min_abs_derivative_outside, std::abs(fam.derivative(x)));
  }

  // (2a)/(2b) with δ = δ0/2: orbits run until they enter C_δ or hit the horizon.
  const double delta = 0.5 * delta0;
  struct Step {
    int n;
    double log_deriv;
    bool in_c0;
  };
  std::vector<std::vector<Step>> runs;
  for (int k = 0; k < samples; ++k) {
    double x = kTwoPi * (k + 0.5) / samples;
    if (dist_to_c(x) < delta) continue;
    std::vector<Step> run;
    double acc = 0.0;
    for (int n = 1; n <= horizon; ++n) {
      acc += std::log(std::abs(fam.derivative(x)));
      x = fam(x);
      const double d = dist_to_c(x);
      run.push_back({n, acc, d < delta0});
      if (d < delta) break;
    }
    runs.push_back(std::move(run));
  }

  rep.lambda0 = std::numeric_limits<double>::infinity();
  for (const auto& run : runs)
    if (!run.empty()) rep.lambda0 = std::min(rep.lambda0, run.back().log_deriv / run.back().n);
  if (runs.empty()) rep.lambda0 = 0.0;

  double b0_a = std::numeric_limits<double>::infinity();
  double b0_b = std::numeric_limits<double>::infinity();
  for (const auto& run : runs)
    for (const auto& st : run) {
      const double excess = st.log_deriv - rep.lambda0 * st.n;
      b0_a = std::min(b0_a, std::exp(excess) / delta);
      if (st.in_c0) b0_b = std::min(b0_b, std::exp(excess));
    }
  rep.b0 = std::min(b0_a, b0_b);
  if (!std::isfinite(rep.b0)) rep.b0 = 0.0;
  rep.cond_2a = rep.lambda0 > 0.0 && b0_a > 0.0;
  rep.cond_2b = rep.lambda0 > 0.0 && b0_b > 0.0;
  rep.mixing_flag = std::exp(rep.lambda0 / 3.0) > 2.0;

  rep.transitions = transition_structure(fam);
  return rep;
}

std::vector<TurnVector> turn_nondegeneracy(const LimitFamily& fam, const std::vector<double>& xs) {
  std::vector<TurnVector> out;
  for (double x : xs) {
    TurnVector v;
    v.x = x;
    v.dx = fam.delta1 * (1.0 + fam.psi2.ds(0.0)) / fam.psi2.value(x, 0.0);
    v.dy = 0.0;
    v.nondegenerate = std::abs(v.dx) > 1e-12 || std::abs(v.dy) > 1e-12;
    out.push_back(v);
  }
  return out;
}

}  // namespace rankone
