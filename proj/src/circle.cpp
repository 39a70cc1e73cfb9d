#include "rankone/circle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "rankone/errors.hpp"
#include "rankone/parallel.hpp"

namespace rankone {

CircleMap::CircleMap(double alpha2, double delta2, TrigPoly psi3)
    : alpha2_(alpha2), delta2_(delta2), psi3_(std::move(psi3)) {
  sup_ = sup_abs_log_derivative(psi3_);
}

CircleMap::CircleMap(double alpha2, double delta2, TrigPoly psi3, double sup)
    : alpha2_(alpha2), delta2_(delta2), psi3_(std::move(psi3)), sup_(sup) {}

CircleMap CircleMap::with_alpha(double alpha2) const { return {alpha2, delta2_, psi3_, sup_}; }
CircleMap CircleMap::with_delta(double delta2) const { return {alpha2_, delta2, psi3_, sup_}; }

double CircleMap::lift(double t) const {
  if (delta2_ == 0.0) return t + alpha2_;
  return t + alpha2_ + delta2_ * std::log(psi3_.value(wrap_angle(t)));
}

double CircleMap::derivative(double t) const {
  const double r = wrap_angle(t);
  return 1.0 + delta2_ * psi3_.derivative(r, 1) / psi3_.value(r);
}

double CircleMap::displacement(double t, int p, int q) const {
  double u = t;
  for (int j = 0; j < q; ++j) u = lift(u);
  return u - t - kTwoPi * p;
}

namespace {

void require_injective(const CircleMap& map) {
  if (!map.injective())
    throw H5Violated(fmt::format("delta2*sup|psi3'/psi3| = {:.6g} >= 1: F3 is not injective",
                                 map.delta2() * map.sup_log_derivative()));
}

void require_coprime(int p, int q) {
  if (q < 1 || std::gcd(p, q) != 1)
    throw InputError(fmt::format("p/q = {}/{} must have q >= 1 and gcd(p, q) = 1", p, q));
}

}  // namespace

RotationEstimate rotation_number(const CircleMap& map, double t0, long burn, long n, int q_max) {
  require_injective(map);
  if (n < 1) throw InputError("rotation_number needs n >= 1");

  double t = wrap_angle(t0);
  for (long i = 0; i < burn; ++i) t = map.apply(t);

  // Keep the angle reduced and count whole turns separately so the lift
  // never grows large enough to lose precision.
  const double start = t;
  long long turns = 0;
  for (long i = 0; i < n; ++i) {
    const double u = map.lift(t);
    const double k = std::floor(u / kTwoPi);
    turns += static_cast<long long>(k);
    t = u - k * kTwoPi;
    if (t >= kTwoPi) {
      t -= kTwoPi;
      ++turns;
    } else if (t < 0.0) {
      t += kTwoPi;
      --turns;
    }
  }
  const double displacement = kTwoPi * static_cast<double>(turns) + (t - start);

  RotationEstimate est;
  est.n_iters = n;
  est.lift_rho = displacement / (kTwoPi * static_cast<double>(n));
  est.rho = est.lift_rho - std::floor(est.lift_rho);
  if (est.rho >= 1.0) est.rho = 0.0;
  est.error_bound = 1.0 / static_cast<double>(n);

  const double tol = 2.0 / static_cast<double>(n);
  for (int q = 1; q <= q_max && !est.locked; ++q) {
    for (int p = 0; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      double d = std::abs(est.rho - static_cast<double>(p) / q);
      d = std::min(d, 1.0 - d);
      if (d <= tol) {
        est.locked = Rational{p, q};
        break;
      }
    }
  }
  return est;
}

namespace {

std::vector<double> bracket_roots(const CircleMap& map, int p, int q, int grid_n, double& min_abs,
                                  double& best_t, bool& adjacent) {
  std::vector<double> f(static_cast<std::size_t>(grid_n) + 1);
  for (int i = 0; i <= grid_n; ++i) f[i] = map.displacement(kTwoPi * i / grid_n, p, q);

  min_abs = std::abs(f[0]);
  best_t = 0.0;
  for (int i = 1; i < grid_n; ++i)
    if (std::abs(f[i]) < min_abs) {
      min_abs = std::abs(f[i]);
      best_t = kTwoPi * i / grid_n;
    }

  std::vector<double> roots;
  adjacent = false;
  int last_change = -2;
  for (int i = 0; i < grid_n; ++i) {
    const double a = kTwoPi * i / grid_n, b = kTwoPi * (i + 1) / grid_n;
    if (f[i] == 0.0) {
      roots.push_back(a);
      continue;
    }
    if (!(f[i] * f[i + 1] < 0.0)) continue;
    if (i == last_change + 1) adjacent = true;
    last_change = i;

    double lo = a, hi = b, flo = f[i];
    while (hi - lo > 1e-12) {
      const double m = 0.5 * (lo + hi);
      const double fm = map.displacement(m, p, q);
      if (fm == 0.0) {
        lo = hi = m;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = m;
        flo = fm;
      } else {
        hi = m;
      }
    }
    roots.push_back(wrap_angle(0.5 * (lo + hi)));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

PeriodicOrbitSearch find_periodic_orbits(const CircleMap& map, int p, int q, int grid_n) {
  require_injective(map);
  require_coprime(p, q);

  PeriodicOrbitSearch out;
  bool adjacent = false;
  out.roots = bracket_roots(map, p, q, grid_n, out.min_abs_residual, out.best_grid_point, adjacent);
  if (adjacent) {
    // GridTooCoarse: neighbouring sign changes may hide a root pair. One refinement.
    out.refined = true;
    out.roots = bracket_roots(map, p, q, grid_n * 8, out.min_abs_residual, out.best_grid_point,
                              adjacent);
  }

  std::vector<bool> used(out.roots.size(), false);
  for (std::size_t i = 0; i < out.roots.size(); ++i) {
    if (used[i]) continue;
    PeriodicOrbit orbit;
    double u = out.roots[i];
    orbit.multiplier = 1.0;
    for (int j = 0; j < q; ++j) {
      orbit.points.push_back(wrap_angle(u));
      orbit.multiplier *= map.derivative(u);
      u = map.lift(u);
    }
    for (double pt : orbit.points)
      for (std::size_t k = 0; k < out.roots.size(); ++k)
        if (!used[k] && circle_distance(out.roots[k], pt) <= 1e-8) used[k] = true;
    orbit.stable = std::abs(orbit.multiplier) < 1.0;
    out.orbits.push_back(std::move(orbit));
  }
  return out;
}

DisplacementRange displacement_range(const CircleMap& map, int p, int q, int grid_n) {
  std::vector<double> f(static_cast<std::size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) f[i] = map.displacement(kTwoPi * i / grid_n, p, q);
  DisplacementRange r{*std::min_element(f.begin(), f.end()), *std::max_element(f.begin(), f.end())};

  const double h = kTwoPi / grid_n;
  auto disp = [&](double t) { return map.displacement(t, p, q); };
  auto neg = [&](double t) { return -map.displacement(t, p, q); };
  for (int i = 0; i < grid_n; ++i) {
    const double prev = f[(i + grid_n - 1) % grid_n], next = f[(i + 1) % grid_n];
    const double c = kTwoPi * i / grid_n;
    if (f[i] >= prev && f[i] >= next) r.max = std::max(r.max, golden_max(disp, c - h, c + h, 1e-12));
    if (f[i] <= prev && f[i] <= next) r.min = std::min(r.min, -golden_max(neg, c - h, c + h, 1e-12));
  }
  return r;
}

bool has_periodic_orbit(const CircleMap& map, int p, int q, int grid_n) {
  constexpr double tol = 1e-12;
  const DisplacementRange r = displacement_range(map, p, q, grid_n);
  return r.min <= tol && r.max >= -tol;
}

Interval tongue_boundary(const TrigPoly& psi3, int p, int q, double delta2, Interval bracket) {
  require_coprime(p, q);
  const CircleMap base(0.0, delta2, psi3);
  require_injective(base);
  auto inside = [&](double a) { return has_periodic_orbit(base.with_alpha(a), p, q); };

  if (inside(bracket.lo) || inside(bracket.hi))
    throw NotBracketed(fmt::format("{}/{} tongue is not enclosed by [{}, {}]", p, q, bracket.lo, bracket.hi));

  std::optional<double> seed;
  const double center = kTwoPi * p / q;
  if (center > bracket.lo && center < bracket.hi && inside(center)) seed = center;
  const int scan = 4096;
  for (int i = 1; i < scan && !seed; ++i) {
    const double a = bracket.lo + (bracket.hi - bracket.lo) * i / scan;
    if (inside(a)) seed = a;
  }
  if (!seed)
    throw NotBracketed(fmt::format("{}/{} tongue not found in [{}, {}]", p, q, bracket.lo, bracket.hi));

  auto bisect = [&](double out, double in) {
    while (std::abs(in - out) > 1e-10) {
      const double m = 0.5 * (in + out);
      if (inside(m))
        in = m;
      else
        out = m;
    }
    return 0.5 * (in + out);
  };
  return {bisect(bracket.lo, *seed), bisect(bracket.hi, *seed)};
}

TongueCell tongue_cell(const CircleMap& map, int q_max, long iters) {
  TongueCell cell;
  cell.alpha2 = map.alpha2();
  cell.delta2 = map.delta2();
  cell.valid = map.injective();
  if (!cell.valid) {
    cell.rho = std::nan("");
    return cell;
  }
  const RotationEstimate est = rotation_number(map, 0.0, 0, iters, q_max);
  cell.rho = est.rho;
  cell.locked = est.locked;
  return cell;
}

TongueGrid tongue_scan(const TrigPoly& psi3, Axis alpha2, Axis delta2, int q_max, long iters,
                       int workers) {
  TongueGrid grid;
  grid.alpha2 = alpha2;
  grid.delta2 = delta2;
  grid.q_max = q_max;
  grid.iters = iters;
  grid.cells.resize(static_cast<std::size_t>(alpha2.n) * delta2.n);
  const CircleMap base(0.0, 0.0, psi3);
  parallel_for(grid.cells.size(), workers, [&](std::size_t idx) {
    const int ia = static_cast<int>(idx % alpha2.n);
    const int id = static_cast<int>(idx / alpha2.n);
    grid.cells[idx] = tongue_cell(base.with_alpha(alpha2.at(ia)).with_delta(delta2.at(id)), q_max, iters);
  });
  return grid;
}

}  // namespace rankone
