#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rankone/trig_poly.hpp"

namespace rankone {

/// The eight scalars of the rotating rank-one family.
struct ModelParams {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double delta = 2.0;   // radial contraction exponent, > 1
  double delta1 = 1.0;
  double delta2 = 0.0;
  double b = 0.5;       // annulus width

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Ψ1, Ψ2, g are functions of (x, y-1); Ψ3 of t; Ψ4 of (x, y-1, t).
struct ModelFunctions {
  XYFunction psi1;
  XYFunction psi2;
  TrigPoly psi3;
  XYTFunction psi4;
  XYFunction g;

  /// Ψ1 = Ψ2 = g = 1.1 + sin x, Ψ3 = Ψ4 = 1.1 + sin t.
  static ModelFunctions sine_family();

  friend bool operator==(const ModelFunctions&, const ModelFunctions&) = default;
};

struct PhaseState {
  double x = 0.0;
  double y = 1.0;
  double t = 0.0;

  friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

using Jacobian3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// F = (F1, F2, F3). x and t reduced mod 2π, y left unclamped.
/// Throws LogDomainError when a log argument (or the radial power base) is
/// not positive.
PhaseState eval_map(const ModelParams& p, const ModelFunctions& f, const PhaseState& s);

/// Same as eval_map without the mod-2π reduction: the lift on R × R × R.
PhaseState eval_map_lift(const ModelParams& p, const ModelFunctions& f, const PhaseState& s);

/// (F1, F2) with t held at t_frozen; x reduced mod 2π.
Vec2 eval_planar(const ModelParams& p, const ModelFunctions& f, double x, double y,
                 double t_frozen);

/// Analytic DF at s. Row/column order (x, y, t).
Jacobian3 eval_jacobian(const ModelParams& p, const ModelFunctions& f, const PhaseState& s);

/// Upper-left 2×2 block of DF: the Jacobian of eval_planar.
Mat2 eval_planar_jacobian(const ModelParams& p, const ModelFunctions& f, double x, double y,
                          double t_frozen);

struct HypothesisCheck {
  std::string name;  // "H1" .. "H6"
  bool pass = false;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;  // H1..H6 in order
  double sup_log_deriv_psi3 = 0.0;      // sup |Ψ3'/Ψ3|
  double delta2_threshold = 0.0;        // 1 / sup, +inf for constant Ψ3
  double min_psi1 = 0.0;
  double min_psi2 = 0.0;
  double min_psi3 = 0.0;
  double min_psi4 = 0.0;
  double min_g = 0.0;
  std::vector<LogCriticalPoint> psi2_critical_points;  // of ln Ψ2(x, 0)

  bool all_pass() const;
  const HypothesisCheck& check(const std::string& name) const;
};

/// Diagnostic; never throws. Positivity is measured on a 4096-point grid per
/// axis, sup |Ψ3'/Ψ3| by an 8192-point grid plus golden-section refinement.
HypothesisReport validate(const ModelParams& p, const ModelFunctions& f);

struct DissipativityGrid {
  int nx = 64;
  int ny = 64;
  int nt = 64;
  double y_lo = 1.0;
  double y_hi = 1.5;
};

struct DissipativityReport {
  double max_abs_det = 0.0;
  double min_abs_det = 0.0;
  double distortion = 0.0;  // max / min
  double max_dF2_dy = 0.0;
  long cells = 0;
  long skipped = 0;         // LogDomain cells
};

DissipativityReport diagnose_dissipativity(const ModelParams& p, const ModelFunctions& f,
                                           const DissipativityGrid& grid);

}  // namespace rankone
