#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rankone/model.hpp"

namespace rankone {

/// ε_(a,n) = exp((a - 2nπ)/δ1): δ1 ln ε ≡ a (mod 2π) and ε decreases in n.
///
/// The alternative exp(-(a + 2nπ)/δ1) gives δ1 ln ε ≡ -a; see
/// eps_for_level_negated for the variant.
double eps_for_level(double a, int n, double delta1);
double eps_for_level_negated(double a, int n, double delta1);

/// Planar map in coordinates (x, ȳ) with ȳ = (y - 1)/ε1:
///   x' = x + α1 + ε1Ψ1 + δ1 ln ε1 + δ1 ln(ȳ + Ψ2 + ε2Ψ4(t))   (mod 2π)
///   ȳ' = ε1^(δ-1) (ȳ + g)^δ
/// with the Ψ's evaluated at y - 1 = ε1 ȳ. Conjugate to eval_planar.
Vec2 eval_rescaled_map(const ModelParams& p, const ModelFunctions& f, double x, double ybar,
                       double t_frozen = 0.0);

/// Rescaled map along the sequence ε = ε_(a,n), with δ1 ln ε replaced by a.
/// eps = 0 is allowed and gives the singular limit itself.
Vec2 eval_rescaled_on_sequence(const ModelParams& p, const ModelFunctions& f, double a,
                               double eps, double x, double ybar);

/// h_a(x) = x + α1 + a + δ1 ln Ψ2(x, 0) and its two-dimensional form
/// h_a(x, ȳ) = x + α1 + a + δ1 ln(ȳ + Ψ2(x, 0)).
struct LimitFamily {
  double a = 0.0;
  double alpha1 = 0.0;
  double delta1 = 1.0;
  XYFunction psi2;

  static LimitFamily from(const ModelParams& p, const ModelFunctions& f, double a);

  double lift(double x) const;
  double operator()(double x) const { return wrap_angle(lift(x)); }
  double derivative(double x) const;         // h'
  double second_derivative(double x) const;  // h''
  double lift2d(double x, double ybar) const;
};

double eval_limit_map(const LimitFamily& fam, double x);

struct ConvergenceRow {
  int n = 0;
  double eps = 0.0;
  double c0_sup = 0.0;
  double c1_sup = 0.0;
};

struct ConvergenceGrid {
  int nx = 256;
  int ny = 64;
  double ybar_max = 1.0;
};

/// Sup-distance of the rescaled map (at ε_(a,n), ε2 = 0) from (h_a(x, ȳ), 0)
/// over x ∈ [0, 2π) × ȳ ∈ [0, ybar_max]. c0 is the sup of
/// circle-distance(x parts) + |ȳ'|; c1 adds the absolute first-derivative
/// differences of both components.
ConvergenceRow convergence_row(const ModelParams& p, const ModelFunctions& f, double a, int n,
                               double eps, const ConvergenceGrid& grid);
std::vector<ConvergenceRow> convergence_table(const ModelParams& p, const ModelFunctions& f,
                                              double a, int n_lo, int n_hi,
                                              const ConvergenceGrid& grid);

/// Critical points of ln Ψ2(x, 0) with their second derivatives. Empty when
/// Ψ2(·, 0) is constant. Throws DegenerateCritical when |(ln Ψ2)''| < 1e-8.
std::vector<LogCriticalPoint> critical_points(const LimitFamily& fam);

/// Zeros of h' in [0, 2π): the critical set C(h).
std::vector<double> limit_critical_set(const LimitFamily& fam, int grid_n = 4096);

struct MonotoneInterval {
  double lo = 0.0;  // lift coordinates, lo < hi <= lo + 2π
  double hi = 0.0;
  double image_lo = 0.0;
  double image_hi = 0.0;
};

struct TransitionStructure {
  std::vector<MonotoneInterval> intervals;
  std::vector<std::vector<int>> q;  // q[i][m] = 1 iff J_m ⊂ h(J_i)
  std::optional<int> mixing_power;  // minimal p <= 16 with Q^p > 0; none is NoMixing
};

TransitionStructure transition_structure(const LimitFamily& fam);

struct MisiurewiczReport {
  std::vector<double> critical_set;     // zeros of h'
  std::vector<double> abs_h2;           // |h''| at each
  double delta0 = 0.0;
  int horizon = 0;
  int samples = 0;

  double min_abs_h2_near_critical = 0.0;  // (1a) over C_δ0
  bool cond_1a = false;
  double min_critical_return = 0.0;       // (1b) min over c, n<=N of dist(h^n(c), C)
  bool cond_1b = false;

  double min_abs_derivative_outside = 0.0;  // min |h'| on S¹ \ C_δ0
  double lambda0 = 0.0;                     // min over runs of (1/n) ln|(h^n)'|
  double b0 = 0.0;
  bool cond_2a = false;
  bool cond_2b = false;
  bool mixing_flag = false;                 // exp(λ0/3) > 2

  TransitionStructure transitions;
  std::string note = "finite-horizon numerical evidence, not a proof";
};

MisiurewiczReport misiurewicz_report(const LimitFamily& fam, double delta0, int horizon,
                                     int samples);

struct TurnVector {
  double x = 0.0;
  double dx = 0.0;  // ∂ȳ of the x-component of the limit map at (x, 0)
  double dy = 0.0;  // ∂ȳ of the ȳ-component, identically 0
  bool nondegenerate = false;
};

/// (δ1 (1 + ∂ȳΨ2(x,0)) / Ψ2(x,0), 0) at each given point.
std::vector<TurnVector> turn_nondegeneracy(const LimitFamily& fam, const std::vector<double>& xs);

}  // namespace rankone
