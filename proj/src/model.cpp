#include "rankone/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "rankone/errors.hpp"

namespace rankone {

ModelFunctions ModelFunctions::sine_family() {
  const TrigPoly s = TrigPoly::shifted_sine(1.1);
  ModelFunctions f;
  f.psi1 = {s, {}};
  f.psi2 = {s, {}};
  f.g = {s, {}};
  f.psi3 = s;
  f.psi4 = {TrigPoly::constant(0.0), {}, s};
  return f;
}

namespace {

// Intermediate quantities shared by the map and its Jacobian.
struct Terms {
  double s;      // y - 1
  double u;      // log argument of F1
  double w;      // radial base of F2
  double psi3;
};

Terms terms(const ModelParams& p, const ModelFunctions& f, double x, double y, double t) {
  Terms r{};
  r.s = y - 1.0;
  r.u = r.s + p.eps1 * (f.psi2.value(x, r.s) + p.eps2 * f.psi4.value(x, r.s, t));
  if (!(r.u > 0.0)) throw LogDomainError("(y-1)+eps1*[psi2+eps2*psi4]", r.u);
  r.w = r.s + p.eps1 * f.g.value(x, r.s);
  if (r.w < 0.0) throw LogDomainError("(y-1)+eps1*g", r.w);
  r.psi3 = f.psi3.value(t);
  if (!(r.psi3 > 0.0)) throw LogDomainError("psi3(t)", r.psi3);
  return r;
}

double lift_x(const ModelParams& p, const ModelFunctions& f, double x, const Terms& r) {
  return x + p.alpha1 + p.eps1 * f.psi1.value(x, r.s) + p.delta1 * std::log(r.u);
}

double radial(const ModelParams& p, const Terms& r) { return 1.0 + std::pow(r.w, p.delta); }

double lift_t(const ModelParams& p, double t, const Terms& r) {
  return t + p.alpha2 + p.delta2 * std::log(r.psi3);
}

}  // namespace

PhaseState eval_map_lift(const ModelParams& p, const ModelFunctions& f, const PhaseState& s) {
  const Terms r = terms(p, f, s.x, s.y, s.t);
  return {lift_x(p, f, s.x, r), radial(p, r), lift_t(p, s.t, r)};
}

PhaseState eval_map(const ModelParams& p, const ModelFunctions& f, const PhaseState& s) {
  PhaseState out = eval_map_lift(p, f, s);
  out.x = wrap_angle(out.x);
  out.t = wrap_angle(out.t);
  return out;
}

Vec2 eval_planar(const ModelParams& p, const ModelFunctions& f, double x, double y,
                 double t_frozen) {
  const Terms r = terms(p, f, x, y, t_frozen);
  return {wrap_angle(lift_x(p, f, x, r)), radial(p, r)};
}

Jacobian3 eval_jacobian(const ModelParams& p, const ModelFunctions& f, const PhaseState& s) {
  const Terms r = terms(p, f, s.x, s.y, s.t);
  const double e1 = p.eps1, e2 = p.eps2;
  const double d1_over_u = p.delta1 / r.u;
  // δ w^(δ-1); at w = 0 this is 0 for δ > 1.
  const double dpow = r.w > 0.0 ? p.delta * std::pow(r.w, p.delta - 1.0) : 0.0;

  Jacobian3 J = Jacobian3::Zero();
  J(0, 0) = 1.0 + e1 * f.psi1.dx(s.x) + d1_over_u * e1 * (f.psi2.dx(s.x) + e2 * f.psi4.dx(s.x));
  J(0, 1) = e1 * f.psi1.ds(r.s) + d1_over_u * (1.0 + e1 * (f.psi2.ds(r.s) + e2 * f.psi4.ds(r.s)));
  J(0, 2) = d1_over_u * e1 * e2 * f.psi4.dt(s.t);
  J(1, 0) = dpow * e1 * f.g.dx(s.x);
  J(1, 1) = dpow * (1.0 + e1 * f.g.ds(r.s));
  J(2, 2) = 1.0 + p.delta2 * f.psi3.derivative(s.t, 1) / r.psi3;
  return J;
}

Mat2 eval_planar_jacobian(const ModelParams& p, const ModelFunctions& f, double x, double y,
                          double t_frozen) {
  return eval_jacobian(p, f, {x, y, t_frozen}).topLeftCorner<2, 2>();
}

bool HypothesisReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const HypothesisCheck& HypothesisReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no hypothesis " + name);
}

HypothesisReport validate(const ModelParams& p, const ModelFunctions& f) {
  HypothesisReport rep;
  const int n = 4096;

  const bool h1 = p.eps1 >= 0.0 && p.eps1 < 1.0 && p.eps2 >= 0.0 && p.eps2 < 1.0;
  rep.checks.push_back({"H1", h1, fmt::format("eps1={:.17g} eps2={:.17g}; need 0<=eps<1", p.eps1, p.eps2)});

  // Rotation angles are only required to be finite: preset values such as
  // 6.2832 sit just above 2π and are used verbatim.
  const bool h2 = std::isfinite(p.alpha1) && std::isfinite(p.alpha2) && p.delta > 1.0 &&
                  p.delta1 > 0.0 && p.delta2 >= 0.0 && p.b > 0.0 && p.b <= 1.0;
  rep.checks.push_back({"H2", h2,
                        fmt::format("alpha1={:.17g} alpha2={:.17g} delta={:.17g} delta1={:.17g} "
                                    "delta2={:.17g} b={:.17g}",
                                    p.alpha1, p.alpha2, p.delta, p.delta1, p.delta2, p.b)});

  // Additive structure: the minimum over the product domain is the sum of
  // per-axis minima.
  const double b = p.b > 0.0 ? p.b : 0.0;
  rep.min_psi1 = f.psi1.x.grid_min(n) + f.psi1.y.grid_min(0.0, b, n);
  rep.min_psi2 = f.psi2.x.grid_min(n) + f.psi2.y.grid_min(0.0, b, n);
  rep.min_psi3 = f.psi3.grid_min(n);
  rep.min_psi4 = f.psi4.x.grid_min(n) + f.psi4.y.grid_min(0.0, b, n) + f.psi4.t.grid_min(n);
  rep.min_g = f.g.x.grid_min(n) + f.g.y.grid_min(0.0, b, n);

  rep.checks.push_back({"H3", rep.min_psi3 > 0.0, fmt::format("min psi3={:.17g}", rep.min_psi3)});

  auto non_constant = [](const XYFunction& h) {
    return !h.x.is_constant() ||
           std::any_of(h.y.coeffs.begin(), h.y.coeffs.end(), [](double c) { return c != 0.0; });
  };
  const bool psi4_nc = !f.psi4.x.is_constant() || !f.psi4.t.is_constant() ||
                       std::any_of(f.psi4.y.coeffs.begin(), f.psi4.y.coeffs.end(),
                                   [](double c) { return c != 0.0; });
  bool h4 = rep.min_psi1 > 0.0 && rep.min_psi2 > 0.0 && rep.min_psi4 > 0.0 && non_constant(f.psi1) &&
            non_constant(f.psi2) && psi4_nc;
  std::string h4_detail = fmt::format("min psi1={:.17g} psi2={:.17g} psi4={:.17g}", rep.min_psi1,
                                      rep.min_psi2, rep.min_psi4);
  if (f.psi2.x.grid_min(n) > 0.0) {
    rep.psi2_critical_points = log_critical_points(f.psi2.x);
    const auto& cps = rep.psi2_critical_points;
    const bool even = !cps.empty() && cps.size() % 2 == 0;
    const bool nondeg = std::all_of(cps.begin(), cps.end(),
                                    [](const auto& c) { return std::abs(c.second_derivative) >= 1e-8; });
    h4 = h4 && even && nondeg;
    h4_detail += fmt::format("; ln psi2(x,0) has {} critical points{}", cps.size(),
                             nondeg ? "" : " (degenerate)");
  } else {
    h4 = false;
  }
  rep.checks.push_back({"H4", h4, h4_detail});

  rep.sup_log_deriv_psi3 = rep.min_psi3 > 0.0 ? sup_abs_log_derivative(f.psi3)
                                              : std::numeric_limits<double>::infinity();
  rep.delta2_threshold = rep.sup_log_deriv_psi3 > 0.0 ? 1.0 / rep.sup_log_deriv_psi3
                                                      : std::numeric_limits<double>::infinity();
  const bool h5 = p.delta2 * rep.sup_log_deriv_psi3 < 1.0;
  rep.checks.push_back({"H5", h5,
                        fmt::format("delta2*sup|psi3'/psi3| = {:.17g} (threshold delta2 < {:.17g})",
                                    p.delta2 * rep.sup_log_deriv_psi3, rep.delta2_threshold)});

  rep.checks.push_back({"H6", rep.min_g >= 0.0, fmt::format("min g={:.17g}", rep.min_g)});
  return rep;
}

DissipativityReport diagnose_dissipativity(const ModelParams& p, const ModelFunctions& f,
                                           const DissipativityGrid& grid) {
  DissipativityReport rep;
  rep.min_abs_det = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.nx; ++i) {
    const double x = kTwoPi * i / grid.nx;
    for (int j = 0; j < grid.ny; ++j) {
      const double y = grid.ny == 1 ? grid.y_lo
                                    : grid.y_lo + (grid.y_hi - grid.y_lo) * j / (grid.ny - 1);
      for (int k = 0; k < grid.nt; ++k) {
        const double t = kTwoPi * k / grid.nt;
        ++rep.cells;
        try {
          const Jacobian3 J = eval_jacobian(p, f, {x, y, t});
          const double d = std::abs(J.determinant());
          rep.max_abs_det = std::max(rep.max_abs_det, d);
          rep.min_abs_det = std::min(rep.min_abs_det, d);
          rep.max_dF2_dy = std::max(rep.max_dF2_dy, J(1, 1));
        } catch (const LogDomainError&) {
          ++rep.skipped;
        }
      }
    }
  }
  rep.distortion = rep.min_abs_det > 0.0 ? rep.max_abs_det / rep.min_abs_det
                                         : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace rankone
