#include "rankone/output.hpp"

#include <cmath>

#include <fmt/format.h>

namespace rankone {

using nlohmann::ordered_json;

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return fmt_num(v);
}

std::string orbit_csv(const OrbitRun& run) {
  std::string out = run.project ? "n,x,y,t,X,Y\n" : "n,x,y,t\n";
  long n = run.first_index;
  for (const PhaseState& s : run.states) {
    out += fmt::format("{},{},{},{}", n++, fmt_num(s.x), fmt_num(s.y), fmt_num(s.t));
    if (run.project) out += fmt::format(",{},{}", fmt_num(s.y * std::cos(s.x)), fmt_num(s.y * std::sin(s.x)));
    out += '\n';
  }
  return out;
}

std::vector<Vec2> projected_points(const OrbitRun& run) {
  std::vector<Vec2> pts;
  pts.reserve(run.states.size());
  for (const PhaseState& s : run.states) pts.emplace_back(s.y * std::cos(s.x), s.y * std::sin(s.x));
  return pts;
}

std::string tongue_csv(const TongueGrid& grid) {
  std::string out = "alpha2,delta2,rho,locked_p,locked_q,valid\n";
  for (const TongueCell& c : grid.cells) {
    const int p = c.locked ? c.locked->p : -1;
    const int q = c.locked ? c.locked->q : -1;
    out += fmt::format("{},{},{},{},{},{}\n", fmt_num(c.alpha2), fmt_num(c.delta2),
                       c.valid ? fmt_num(c.rho) : "nan", p, q, c.valid ? 1 : 0);
  }
  return out;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "n,eps,c0_sup,c1_sup\n";
  for (const ConvergenceRow& r : rows)
    out += fmt::format("{},{},{},{}\n", r.n, fmt_num(r.eps), fmt_num(r.c0_sup), fmt_num(r.c1_sup));
  return out;
}

ordered_json hypothesis_json(const ModelParams& p, const HypothesisReport& rep) {
  ordered_json checks = ordered_json::array();
  for (const HypothesisCheck& c : rep.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  ordered_json crit = ordered_json::array();
  for (const LogCriticalPoint& c : rep.psi2_critical_points)
    crit.push_back({{"x", c.x}, {"second_derivative", c.second_derivative}});
  return ordered_json{{"all_pass", rep.all_pass()},
                      {"checks", checks},
                      {"delta2", p.delta2},
                      {"sup_abs_log_derivative_psi3", json_number(rep.sup_log_deriv_psi3)},
                      {"delta2_threshold", json_number(rep.delta2_threshold)},
                      {"min_values",
                       {{"psi1", rep.min_psi1},
                        {"psi2", rep.min_psi2},
                        {"psi3", rep.min_psi3},
                        {"psi4", rep.min_psi4},
                        {"g", rep.min_g}}},
                      {"psi2_log_critical_points", crit}};
}

ordered_json lyapunov_json(const LyapunovEstimate& est) {
  ordered_json exps = ordered_json::array();
  for (double e : est.exponents) exps.push_back(json_number(e));
  ordered_json hist = ordered_json::array();
  for (const LyapunovHistoryEntry& h : est.history) {
    ordered_json row = ordered_json::array();
    for (double e : h.exponents) row.push_back(json_number(e));
    hist.push_back({{"iter", h.iter}, {"exponents", row}});
  }
  return ordered_json{{"exponents", exps},
                      {"sum", json_number(est.sum())},
                      {"mean_log_abs_det", json_number(est.mean_log_det)},
                      {"qr_period", est.qr_period},
                      {"iters", est.iters},
                      {"escaped", est.escaped},
                      {"escape_step", est.escape_step ? ordered_json(*est.escape_step) : ordered_json(nullptr)},
                      {"history", hist}};
}

ordered_json rotation_json(const CircleMap& map, const RotationEstimate& est) {
  ordered_json locked = nullptr;
  if (est.locked) locked = {{"p", est.locked->p}, {"q", est.locked->q}};
  return ordered_json{{"alpha2", map.alpha2()},
                      {"delta2", map.delta2()},
                      {"rho", est.rho},
                      {"lift_rho", est.lift_rho},
                      {"n_iters", est.n_iters},
                      {"error_bound", est.error_bound},
                      {"locked", locked}};
}

ordered_json misiurewicz_json(const LimitFamily& fam, const MisiurewiczReport& rep) {
  ordered_json crit = ordered_json::array();
  for (std::size_t i = 0; i < rep.critical_set.size(); ++i)
    crit.push_back({{"x", rep.critical_set[i]}, {"abs_h2", rep.abs_h2[i]}});
  ordered_json intervals = ordered_json::array();
  for (const MonotoneInterval& j : rep.transitions.intervals)
    intervals.push_back({{"lo", j.lo}, {"hi", j.hi}, {"image_lo", j.image_lo}, {"image_hi", j.image_hi}});
  ordered_json mixing = nullptr;
  if (rep.transitions.mixing_power) mixing = *rep.transitions.mixing_power;
  return ordered_json{
      {"a", fam.a},
      {"alpha1", fam.alpha1},
      {"delta1", fam.delta1},
      {"delta0", rep.delta0},
      {"horizon", rep.horizon},
      {"samples", rep.samples},
      {"critical_points", crit},
      {"conditions",
       {{"1a", {{"pass", rep.cond_1a}, {"min_abs_h2_near_critical", json_number(rep.min_abs_h2_near_critical)}}},
        {"1b", {{"pass", rep.cond_1b}, {"min_critical_return", json_number(rep.min_critical_return)}}},
        {"2a", {{"pass", rep.cond_2a}, {"min_abs_derivative_outside", json_number(rep.min_abs_derivative_outside)}}},
        {"2b", {{"pass", rep.cond_2b}, {"lambda0", json_number(rep.lambda0)}, {"b0", json_number(rep.b0)}}}}},
      {"lambda0", json_number(rep.lambda0)},
      {"b0", json_number(rep.b0)},
      {"mixing_flag", rep.mixing_flag},
      {"intervals", intervals},
      {"transition_matrix", rep.transitions.q},
      {"mixing_power", mixing},
      {"note", rep.note}};
}

ordered_json fixed_point_json(const PlanarFixedPoint& fp) {
  auto cplx = [](std::complex<double> z) { return ordered_json{{"re", z.real()}, {"im", z.imag()}}; };
  return ordered_json{{"x", fp.point.x()},
                      {"y", fp.point.y()},
                      {"period", fp.period},
                      {"kind", to_string(fp.kind)},
                      {"multipliers", {cplx(fp.mu1), cplx(fp.mu2)}},
                      {"det", fp.det},
                      {"residual", fp.residual}};
}

std::string manifolds_csv(const PlanarMap& map, const ManifoldSegment& wu, const ManifoldSegment& ws,
                          const std::vector<Crossing>& crossings) {
  std::string out = "curve,index,x,y,X,Y,angle\n";
  auto emit = [&](const char* name, const ManifoldSegment& seg) {
    for (std::size_t i = 0; i < seg.points.size(); ++i) {
      const Vec2& z = seg.points[i];
      const Vec2 P = plane_point(map, z);
      out += fmt::format("{},{},{},{},{},{},\n", name, i, fmt_num(z.x()), fmt_num(z.y()), fmt_num(P.x()), fmt_num(P.y()));
    }
  };
  emit("unstable", wu);
  emit("stable", ws);
  for (std::size_t i = 0; i < crossings.size(); ++i) {
    const Vec2& P = crossings[i].point;
    Vec2 z = P;
    if (map.periodic_x) z = Vec2(wrap_angle(std::atan2(P.y(), P.x())), P.norm());
    out += fmt::format("crossing,{},{},{},{},{},{}\n", i, fmt_num(z.x()), fmt_num(z.y()), fmt_num(P.x()),
                       fmt_num(P.y()), fmt_num(crossings[i].angle));
  }
  return out;
}

}  // namespace rankone
