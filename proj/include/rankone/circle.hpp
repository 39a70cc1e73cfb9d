#pragma once

#include <optional>
#include <vector>

#include "rankone/trig_poly.hpp"

namespace rankone {

/// The Arnold factor t ↦ t + α2 + δ2 ln Ψ3(t) (mod 2π).
///
/// sup |Ψ3'/Ψ3| is computed once at construction; with_alpha / with_delta
/// reuse it, which keeps parameter scans cheap.
class CircleMap {
 public:
  CircleMap(double alpha2, double delta2, TrigPoly psi3);

  double alpha2() const { return alpha2_; }
  double delta2() const { return delta2_; }
  const TrigPoly& psi3() const { return psi3_; }

  double sup_log_derivative() const { return sup_; }
  /// H5: δ2 · sup |Ψ3'/Ψ3| < 1, i.e. the lift is strictly increasing.
  bool injective() const { return delta2_ * sup_ < 1.0; }

  /// Degree-one lift on the real line: L(t + 2π) = L(t) + 2π.
  double lift(double t) const;
  /// L'(t) = 1 + δ2 Ψ3'(t)/Ψ3(t).
  double derivative(double t) const;
  double apply(double t) const { return wrap_angle(lift(t)); }

  /// L^q(t) - t - 2πp: zero exactly at points of a p/q periodic orbit.
  double displacement(double t, int p, int q) const;

  CircleMap with_alpha(double alpha2) const;
  CircleMap with_delta(double delta2) const;

 private:
  CircleMap(double alpha2, double delta2, TrigPoly psi3, double sup);

  double alpha2_;
  double delta2_;
  TrigPoly psi3_;
  double sup_;
};

struct Rational {
  int p = 0;
  int q = 1;
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct RotationEstimate {
  double rho = 0.0;        // in [0, 1)
  double lift_rho = 0.0;   // unreduced (L^n(t) - t) / (2π n)
  long n_iters = 0;
  double error_bound = 0.0;  // 1/n Birkhoff bound for homeomorphisms
  std::optional<Rational> locked;
};

/// Birkhoff estimate from the lift after a burn-in. Locking is declared when
/// rho is within 2/n (circularly) of some p/q with q <= q_max; the smallest
/// such q wins. Throws H5Violated when the map is not injective.
RotationEstimate rotation_number(const CircleMap& map, double t0, long burn, long n,
                                 int q_max = 12);

struct PeriodicOrbit {
  std::vector<double> points;  // t, F3(t), ..., F3^(q-1)(t), each in [0, 2π)
  double multiplier = 0.0;     // d(F3^q)/dt
  bool stable = false;         // |multiplier| < 1
};

struct PeriodicOrbitSearch {
  std::vector<PeriodicOrbit> orbits;
  std::vector<double> roots;   // every root of the displacement, sorted
  double min_abs_residual = 0.0;  // min over the bracketing grid of |L^q(t)-t-2πp|
  double best_grid_point = 0.0;
  bool refined = false;        // the GridTooCoarse advisory fired and the grid was refined
};

/// All p/q periodic orbits by sign-change bracketing on grid_n points then
/// bisection to 1e-12. Throws H5Violated when the map is not injective.
PeriodicOrbitSearch find_periodic_orbits(const CircleMap& map, int p, int q, int grid_n = 4096);

/// Extremes of L^q(t) - t - 2πp over the circle (grid + golden-section).
struct DisplacementRange {
  double min = 0.0;
  double max = 0.0;
};
DisplacementRange displacement_range(const CircleMap& map, int p, int q, int grid_n = 4096);

/// True when a p/q periodic orbit exists: the displacement range contains 0.
bool has_periodic_orbit(const CircleMap& map, int p, int q, int grid_n = 4096);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Boundaries in α2 of the p/q tongue at fixed δ2, by bisection on
/// has_periodic_orbit to 1e-8 (or better). The bracket must contain part of
/// the tongue but not be contained in it; otherwise NotBracketed.
Interval tongue_boundary(const TrigPoly& psi3, int p, int q, double delta2, Interval bracket);

struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;
  /// Grid value i; endpoints inclusive.
  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

struct TongueCell {
  double alpha2 = 0.0;
  double delta2 = 0.0;
  double rho = 0.0;
  std::optional<Rational> locked;
  bool valid = false;
};

struct TongueGrid {
  Axis alpha2;
  Axis delta2;
  int q_max = 12;
  long iters = 0;
  std::vector<TongueCell> cells;  // row-major: row = delta2 index, column = alpha2 index

  const TongueCell& at(int ia, int id) const { return cells[static_cast<std::size_t>(id) * alpha2.n + ia]; }
};

/// One scan cell: rotation_number from t0 = 0 without burn-in. Cells above the
/// H5 threshold are flagged invalid and not classified.
TongueCell tongue_cell(const CircleMap& map, int q_max, long iters);

/// Rotation-number raster over (α2, δ2). Cells are independent; workers > 1
/// splits them across threads without changing the result.
TongueGrid tongue_scan(const TrigPoly& psi3, Axis alpha2, Axis delta2, int q_max, long iters,
                       int workers = 1);

}  // namespace rankone
