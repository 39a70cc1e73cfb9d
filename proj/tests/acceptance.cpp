// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "rankone/circle.hpp"
#include "rankone/config.hpp"
#include "rankone/model.hpp"
#include "rankone/orbit.hpp"
#include "rankone/planar.hpp"
#include "rankone/presets.hpp"
#include "rankone/singular_limit.hpp"
#include "rankone/sweep.hpp"

using namespace rankone;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Jacobian3 fd_jacobian(const ModelParams& p, const ModelFunctions& f, const PhaseState& s, double h) {
  Jacobian3 J;
  for (int c = 0; c < 3; ++c) {
    PhaseState a = s, b = s;
    double* pa = c == 0 ? &a.x : c == 1 ? &a.y : &a.t;
    double* pb = c == 0 ? &b.x : c == 1 ? &b.y : &b.t;
    *pa += h;
    *pb -= h;
    const PhaseState fa = eval_map_lift(p, f, a), fb = eval_map_lift(p, f, b);
    J(0, c) = (fa.x - fb.x) / (2 * h);
    J(1, c) = (fa.y - fb.y) / (2 * h);
    J(2, c) = (fa.t - fb.t) / (2 * h);
  }
  return J;
}

Outcome jacobian_correctness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240501);
  double worst = 0.0;
  for (const std::string& name : preset_names()) {
    const FigurePreset fp = figure_preset(name);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi), rad(1.0, 1.0 + fp.params.b);
    for (int i = 0; i < 100; ++i) {
      const PhaseState s{ang(rng), rad(rng), ang(rng)};
      const Jacobian3 Ja = eval_jacobian(fp.params, fp.funcs, s);
      const Jacobian3 Jf = fd_jacobian(fp.params, fp.funcs, s, 1e-6);
      worst = std::max(worst, (Ja - Jf).norm() / std::max(1.0, Ja.norm()));
    }
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-6 && dt < 1.0, fmt::format("max relative error {:.2e} over 400 states, {:.3f} s", worst, dt)};
}

Outcome h5_threshold() {
  const auto t0 = Clock::now();
  ModelParams p = figure_preset("fig7").params;
  const ModelFunctions f = ModelFunctions::sine_family();
  p.delta2 = 0.001;
  const HypothesisReport lo = validate(p, f);
  p.delta2 = 0.5;
  const HypothesisReport hi = validate(p, f);
  const double dt = seconds_since(t0);
  const bool ok = std::abs(lo.sup_log_deriv_psi3 - 2.1822) <= 1e-3 && lo.all_pass() && !hi.all_pass() &&
                  !hi.check("H5").pass && dt < 1.0;
  return {ok, fmt::format("sup |psi3'/psi3| = {:.10f}, check at 0.001: {}, at 0.5: {} (H5 {}), {:.3f} s",
                          lo.sup_log_deriv_psi3, lo.all_pass() ? "pass" : "fail", hi.all_pass() ? "pass" : "fail",
                          hi.check("H5").pass ? "pass" : "fail", dt)};
}

Outcome singular_limit_convergence() {
  const auto t0 = Clock::now();
  ModelParams p;
  p.delta1 = 5.0;
  const ModelFunctions f = ModelFunctions::sine_family();
  ConvergenceGrid g;
  g.nx = 256;
  g.ny = 64;
  // n = 7, 8 extend the table until eps drops below 1e-4.
  const auto rows = convergence_table(p, f, 1.0, 1, 8, g);
  bool decreasing = true, small = true;
  int small_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    decreasing = decreasing && rows[i].c0_sup < rows[i - 1].c0_sup && rows[i].c1_sup < rows[i - 1].c1_sup;
  for (const auto& r : rows)
    if (r.eps <= 1e-4) {
      ++small_rows;
      small = small && r.c0_sup <= 1e-3;
    }
  const double dt = seconds_since(t0);
  return {decreasing && small && small_rows > 0 && dt < 10.0,
          fmt::format("n=1..8 strictly decreasing: {}, C0 at n=6 {:.3e} (eps {:.2e}), at n=8 {:.3e} (eps {:.2e}), {:.2f} s",
                      decreasing, rows[5].c0_sup, rows[5].eps, rows[7].c0_sup, rows[7].eps, dt)};
}

Outcome critical_structure() {
  ModelParams p;
  p.delta1 = 5.0;
  const auto cps = critical_points(LimitFamily::from(p, ModelFunctions::sine_family(), 0.0));
  if (cps.size() != 2) return {false, fmt::format("{} critical points", cps.size())};
  const double pi = std::numbers::pi;
  const double e0 = std::abs(cps[0].x - pi / 2), e1 = std::abs(cps[1].x - 3 * pi / 2);
  const double d0 = std::abs(cps[0].second_derivative + 1.0 / 2.1), d1 = std::abs(cps[1].second_derivative - 10.0);
  return {e0 <= 1e-8 && e1 <= 1e-8 && d0 <= 1e-6 && d1 <= 1e-6,
          fmt::format("x = {:.12f}, {:.12f}; (ln psi2)'' = {:.9f}, {:.9f}", cps[0].x, cps[1].x,
                      cps[0].second_derivative, cps[1].second_derivative)};
}

Outcome rotation_numbers() {
  const auto t0 = Clock::now();
  const TrigPoly psi3 = ModelFunctions::sine_family().psi3;
  double worst = 0.0;
  for (double a : {0.0, 0.5, 1.0, 2.0, 3.14155, 4.4407, 6.0}) {
    const RotationEstimate est = rotation_number(CircleMap(a, 0.0, psi3), 0.3, 0, 1000);
    worst = std::max(worst, circle_distance(kTwoPi * est.rho, a) / kTwoPi);
  }
  const FigurePreset fig6 = figure_preset("fig6");
  const CircleMap map(fig6.params.alpha2, fig6.params.delta2, psi3);
  const RotationEstimate est = rotation_number(map, fig6.ic.t, 0, 1'000'000);
  const double dt = seconds_since(t0);
  return {worst <= 1e-9 && std::abs(est.rho - 0.70676) <= 1e-3 && !est.locked && dt < 5.0,
          fmt::format("delta2=0 max error {:.1e}; fig6 rho = {:.7f}, locked: {}, {:.2f} s", worst, est.rho,
                      est.locked ? fmt::format("{}/{}", est.locked->p, est.locked->q) : "no", dt)};
}

// Cells locked to an integer rotation (q = 1) must form one set, connected
// with alpha2 periodic, containing the cell at (alpha2 = 0, delta2 = 0); every
// row must be one circular run through alpha2 = 0 that widens with delta2.
Outcome tongue_geometry() {
  const TrigPoly psi3 = ModelFunctions::sine_family().psi3;
  const double slope = std::log(21.0);
  double worst = 0.0;
  for (double d : {0.05, 0.1, 0.2}) {
    const Interval iv = tongue_boundary(psi3, 0, 1, d, {-1.0, 1.0});
    worst = std::max(worst, std::abs(iv.width() - 3.04452 * d));
  }
  const auto t0 = Clock::now();
  const Axis a2{0.0, kTwoPi, 400};
  const Axis d2{0.0, 0.45, 200};
  const TongueGrid grid = tongue_scan(psi3, a2, d2, 12, 2000, 4);
  const double dt = seconds_since(t0);

  const int na = a2.n, nd = d2.n;
  auto in_tongue = [&](int i, int j) {
    const TongueCell& c = grid.at(i, j);
    return c.valid && c.locked && c.locked->q == 1;
  };
  std::vector<char> seen(grid.cells.size(), 0);
  std::deque<std::pair<int, int>> queue;
  long total = 0, reached = 0;
  for (int j = 0; j < nd; ++j)
    for (int i = 0; i < na; ++i) total += in_tongue(i, j);
  if (in_tongue(0, 0)) {
    queue.emplace_back(0, 0);
    seen[0] = 1;
  }
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    ++reached;
    const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int ni = (i + di[k] + na) % na, nj = j + dj[k];
      if (nj < 0 || nj >= nd) continue;
      const std::size_t idx = static_cast<std::size_t>(nj) * na + ni;
      if (seen[idx] || !in_tongue(ni, nj)) continue;
      seen[idx] = 1;
      queue.emplace_back(ni, nj);
    }
  }
  bool wedge = true;
  int prev_width = 0;
  for (int j = 0; j < nd && wedge; ++j) {
    if (!in_tongue(0, j)) {
      wedge = false;
      break;
    }
    int run = 1;
    while (run < na && in_tongue(run, j)) ++run;
    int back = 0;
    while (back < na - run && in_tongue(na - 1 - back, j)) ++back;
    int count = 0;
    for (int i = 0; i < na; ++i) count += in_tongue(i, j);
    const int width = run + back;
    if (count != width || width < prev_width) wedge = false;
    prev_width = width;
  }
  const bool ok = worst <= 1e-6 && total > 0 && reached == total && wedge && dt < 120.0;
  return {ok, fmt::format("width slope ln 21 = {:.8f}, max width error {:.1e}; scan 400x200: {} locked cells, "
                          "{} connected to the root, wedge rows: {}, {:.2f} s on 4 workers",
                          slope, worst, total, reached, wedge, dt)};
}

Outcome lyapunov_engine() {
  LinearDiagnosticMap3 diag;
  diag.A = Eigen::Vector3d(2.0, 0.5, 1.0).asDiagonal();
  LyapunovConfig lc;
  lc.iters = 10000;
  const LyapunovEstimate d = lyapunov_spectrum(diag, Eigen::Vector3d(0.1, 0.2, 0.3), lc);
  const double ln2 = std::log(2.0);
  const bool diag_ok = std::abs(d.exponents[0] - ln2) <= 1e-3 && std::abs(d.exponents[1]) <= 1e-3 &&
                       std::abs(d.exponents[2] + ln2) <= 1e-3;
  double worst_sum = std::abs(d.sum() - d.mean_log_det);

  const FigurePreset fp = figure_preset("fig5");
  std::vector<LyapunovEstimate> runs;
  for (int period : {1, 5, 10, 20}) {
    LyapunovConfig c;
    c.iters = 100000;
    c.burn = fp.burn;
    c.qr_period = period;
    c.history_stride = 0;
    runs.push_back(lyapunov_spectrum(fp.params, fp.funcs, fp.ic, c));
    worst_sum = std::max(worst_sum, std::abs(runs.back().sum() - runs.back().mean_log_det));
  }
  double spread = 0.0;
  for (const auto& r : runs)
    for (int k = 0; k < 3; ++k) spread = std::max(spread, std::abs(r.exponents[k] - runs[0].exponents[k]));
  return {diag_ok && worst_sum <= 1e-6 && spread <= 1e-3,
          fmt::format("diag(2,0.5,1): ({:.6f}, {:.6f}, {:.6f}); sum identity max error {:.1e}; "
                      "fig5 spread over qr_period 1/5/10/20: {:.1e}",
                      d.exponents[0], d.exponents[1], d.exponents[2], worst_sum, spread)};
}

Outcome figure_reproduction() {
  bool ok = true;
  std::string detail;
  for (const std::string& name : preset_names()) {
    const auto t0 = Clock::now();
    const FigurePreset fp = figure_preset(name);
    OrbitConfig oc;
    oc.burn = fp.burn;
    oc.samples = fp.samples;
    const OrbitRun run = iterate_orbit(fp.params, fp.funcs, fp.ic, oc);
    LyapunovConfig lc;
    lc.iters = 100000;
    lc.burn = fp.burn;
    lc.history_stride = 0;
    const LyapunovEstimate est = lyapunov_spectrum(fp.params, fp.funcs, fp.ic, lc);
    const double dt = seconds_since(t0);
    bool fig_ok = !run.escaped && !est.escaped && est.exponents[0] > 0 && est.sum() < 0 && dt < 60.0;
    double nearest_zero = std::numeric_limits<double>::infinity();
    for (double e : est.exponents) nearest_zero = std::min(nearest_zero, std::abs(e));
    if (name == "fig6") fig_ok = fig_ok && nearest_zero <= 1e-3;
    ok = ok && fig_ok;
    detail += fmt::format("{}{} {}: escaped {}, lambda = ({:.5f}, {:.5f}, {:.5f}), sum {:.5f}, {:.1f} s",
                          detail.empty() ? "" : "; ", name, fig_ok ? "ok" : "FAILED", run.escaped, est.exponents[0],
                          est.exponents[1], est.exponents[2], est.sum(), dt);
  }
  return {ok, detail};
}

Outcome resonant_t_dynamics() {
  const FigurePreset f7 = figure_preset("fig7");
  const CircleMap m7(f7.params.alpha2, f7.params.delta2, f7.funcs.psi3);
  double t = f7.ic.t;
  for (long i = 0; i < f7.burn; ++i) t = m7.apply(t);
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < f7.samples; ++i) {
    best = std::min(best, std::abs(m7.displacement(t, 1, 2)));
    t = m7.apply(t);
  }
  const FigurePreset f8 = figure_preset("fig8");
  const CircleMap m8(f8.params.alpha2, f8.params.delta2, f8.funcs.psi3);
  const RotationEstimate est = rotation_number(m8, f8.ic.t, f8.burn, f8.samples);
  return {best < 1e-3 && std::abs(est.rho - 0.25) <= 1e-4,
          fmt::format("fig7 min |L^2(t) - t - 2pi| = {:.3e}; fig8 rho = {:.9f}", best, est.rho)};
}

Outcome mixing_diagnostics() {
  ModelParams p;
  p.delta1 = 100.0;
  const ModelFunctions f = ModelFunctions::sine_family();
  const MisiurewiczReport strong = misiurewicz_report(LimitFamily::from(p, f, 0.0), 0.1, 50, 64);
  p.delta1 = 1.0;
  const MisiurewiczReport weak = misiurewicz_report(LimitFamily::from(p, f, 0.0), 0.1, 50, 64);
  const auto& tr = strong.transitions;
  bool all_ones = !tr.q.empty();
  for (const auto& row : tr.q)
    for (int v : row) all_ones = all_ones && v == 1;
  const bool ok = tr.intervals.size() == 2 && all_ones && tr.mixing_power == 1 && !weak.cond_2a;
  return {ok, fmt::format("delta1=100: r = {}, Q all ones: {}, p = {}; delta1=1: (2a) {}", tr.intervals.size(),
                          all_ones, tr.mixing_power ? std::to_string(*tr.mixing_power) : "none",
                          weak.cond_2a ? "holds" : "failed")};
}

Outcome saddle_manifolds() {
  const auto t0 = Clock::now();
  const FigurePreset fp = figure_preset("fig5");
  const PlanarMap map = restricted(fp.params, fp.funcs, 0.0);
  ManifoldConfig mc;
  mc.arc_target = 10.0;
  const HomoclinicSearch hs = search_homoclinic(map, fp.params.b, 4, mc);
  const double dt = seconds_since(t0);
  if (hs.saddles_found == 0) return {true, "no saddle of period <= 4: structured failure reported"};
  if (!hs.best) return {false, fmt::format("{} saddles, no manifold could be grown: {}", hs.saddles_found, hs.last_error)};
  const HomoclinicCandidate& c = *hs.best;
  const bool ok = c.complete && c.saddle.residual <= 1e-10;
  return {ok, fmt::format("{} saddles; saddle ({:.6f}, {:.6f}) period {} residual {:.1e}; W^u arc {:.2f} inv {:.1e}, "
                          "W^s arc {:.2f} inv {:.1e}; {} transverse crossings; {:.1f} s",
                          hs.saddles_found, c.saddle.point.x(), c.saddle.point.y(), c.saddle.period,
                          c.saddle.residual, c.unstable.arclength, c.unstable_invariance, c.stable.arclength,
                          c.stable_invariance, c.transverse, dt)};
}

Outcome sweep_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / fmt::format("rankone_acceptance_{:x}", std::random_device{}());
  fs::remove_all(root);
  fs::create_directories(root);
  SweepSpec spec;
  spec.quantity = SweepQuantity::rho;
  spec.axes = {SweepAxis{"alpha2", 0.0, kTwoPi, 64}, SweepAxis{"delta2", 0.0, 0.4, 64}};
  spec.params = figure_preset("fig6").params;
  spec.budget = 1000;
  spec.chunk_size = 256;

  auto run = [&](const std::string& tag, int workers, bool interrupt) {
    SweepSpec s = spec;
    s.output = (root / (tag + ".csv")).string();
    s.checkpoint = (root / tag).string();
    if (interrupt) {
      run_sweep(s, {workers, 5});
      resume_sweep(s, {workers, 11});
      resume_sweep(s, {workers, {}});
    } else {
      run_sweep(s, {workers, {}});
    }
    return read_text_file(s.output);
  };
  const std::string one = run("w1", 1, false);
  const std::string four = run("w4", 4, false);
  const std::string resumed = run("resumed", 4, true);
  fs::remove_all(root);
  const bool ok = !one.empty() && one == four && one == resumed;
  return {ok, fmt::format("64x64 rho sweep: {} bytes; 1 vs 4 workers identical: {}; interrupted+resumed identical: {}",
                          one.size(), one == four, one == resumed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"jacobian correctness", jacobian_correctness},
      {"H5 threshold", h5_threshold},
      {"singular-limit convergence", singular_limit_convergence},
      {"critical structure", critical_structure},
      {"rotation numbers", rotation_numbers},
      {"tongue geometry", tongue_geometry},
      {"Lyapunov engine", lyapunov_engine},
      {"figure reproduction", figure_reproduction},
      {"resonant t-dynamics", resonant_t_dynamics},
      {"mixing diagnostics", mixing_diagnostics},
      {"saddle and manifold evidence", saddle_manifolds},
      {"sweep determinism", sweep_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << fmt::format("{} {:2d} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail)
              << std::flush;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
