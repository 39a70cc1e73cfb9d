// rankone: command-line front end for the rotating rank-one map laboratory.

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rankone/circle.hpp"
#include "rankone/config.hpp"
#include "rankone/errors.hpp"
#include "rankone/orbit.hpp"
#include "rankone/output.hpp"
#include "rankone/planar.hpp"
#include "rankone/ppm.hpp"
#include "rankone/presets.hpp"
#include "rankone/singular_limit.hpp"
#include "rankone/sweep.hpp"

using namespace rankone;
using nlohmann::ordered_json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

Axis parse_range(const std::string& spec, const std::string& flag) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos)
    throw InputError(flag + " expects <lo>:<hi>:<n>, got \"" + spec + "\"");
  try {
    std::size_t used = 0;
    Axis axis;
    const std::string lo = spec.substr(0, a), hi = spec.substr(a + 1, b - a - 1), n = spec.substr(b + 1);
    axis.lo = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    axis.hi = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
    axis.n = std::stoi(n, &used);
    if (used != n.size()) throw std::invalid_argument(n);
    if (axis.n < 1) throw InputError(flag + ": n must be at least 1");
    return axis;
  } catch (const std::logic_error&) {
    throw InputError(flag + " expects <lo>:<hi>:<n>, got \"" + spec + "\"");
  }
}

void write_json(const std::string& path, const ordered_json& j) { write_text_file_atomic(path, j.dump(2) + "\n"); }

struct Options {
  std::string config, out, ppm, name, spec, checkpoint, a2, d2;
  bool strict = false, project = false;
  double x0 = 0, y0 = 0, t0 = 0, a = 0, delta0 = 0.1, arc = 10.0, t_frozen = 0.0;
  long burn = 0, samples = 0, iters = 0, horizon = 50;
  int qr_period = 10, qmax = 12, nmax = 6, grid = 256, period_max = 4, width = 800, height = 800;
  int workers = 1, misiurewicz_samples = 64;
  std::optional<long> stop_after;
};

int cmd_check(const Options& o) {
  const ModelConfig cfg = parse_config(o.config, o.strict);
  const HypothesisReport rep = validate(cfg.params, cfg.funcs);
  std::cout << hypothesis_json(cfg.params, rep).dump(2) << "\n";
  return rep.all_pass() ? 0 : kExitInput;
}

int write_orbit(const OrbitRun& run, const Options& o) {
  write_text_file_atomic(o.out, orbit_csv(run));
  if (!o.ppm.empty()) {
    const auto pts = projected_points(run);
    write_text_file_atomic(o.ppm, render_ppm(pts, bounds_of(pts), o.width, o.height));
  }
  if (run.escaped) {
    std::cerr << fmt::format("orbit escaped at step {}; {} states written\n", *run.escape_step, run.states.size());
    return kExitNumerical;
  }
  return 0;
}

int cmd_orbit(const Options& o) {
  const ModelConfig cfg = parse_config(o.config);
  OrbitConfig oc;
  oc.burn = o.burn;
  oc.samples = o.samples;
  oc.project = o.project || !o.ppm.empty();
  const OrbitRun run = iterate_orbit(cfg.params, cfg.funcs, {o.x0, o.y0, o.t0}, oc);
  return write_orbit(run, o);
}

int cmd_lyapunov(const Options& o) {
  const ModelConfig cfg = parse_config(o.config);
  LyapunovConfig lc;
  lc.iters = o.iters;
  lc.qr_period = o.qr_period;
  const LyapunovEstimate est = lyapunov_spectrum(cfg.params, cfg.funcs, {o.x0, o.y0, o.t0}, lc);
  write_json(o.out, lyapunov_json(est));
  if (est.escaped) {
    std::cerr << fmt::format("orbit escaped at step {}; partial estimate written\n", *est.escape_step);
    return kExitNumerical;
  }
  return 0;
}

int cmd_rotation(const Options& o) {
  const ModelConfig cfg = parse_config(o.config);
  const CircleMap map(cfg.params.alpha2, cfg.params.delta2, cfg.funcs.psi3);
  const RotationEstimate est = rotation_number(map, o.t0, o.burn, o.iters, o.qmax);
  write_json(o.out, rotation_json(map, est));
  return 0;
}

int cmd_tongues(const Options& o) {
  const ModelConfig cfg = parse_config(o.config);
  const TongueGrid grid = tongue_scan(cfg.funcs.psi3, parse_range(o.a2, "--a2"), parse_range(o.d2, "--d2"), o.qmax,
                                      o.iters, o.workers);
  write_text_file_atomic(o.out, tongue_csv(grid));
  return 0;
}

int cmd_limit(const Options& o) {
  const ModelConfig cfg = parse_config(o.config);
  ConvergenceGrid g;
  g.nx = o.grid;
  g.ny = std::max(1, o.grid / 4);
  const auto rows = convergence_table(cfg.params, cfg.funcs, o.a, 1, o.nmax, g);
  write_text_file_atomic(o.out, convergence_csv(rows));
  return 0;
}

int cmd_misiurewicz(const Options& o) {
  const ModelConfig cfg = parse_config(o.config);
  const LimitFamily fam = LimitFamily::from(cfg.params, cfg.funcs, o.a);
  const MisiurewiczReport rep = misiurewicz_report(fam, o.delta0, static_cast<int>(o.horizon), o.misiurewicz_samples);
  write_json(o.out, misiurewicz_json(fam, rep));
  return 0;
}

int cmd_manifolds(const Options& o) {
  const ModelConfig cfg = parse_config(o.config);
  const PlanarMap map = restricted(cfg.params, cfg.funcs, o.t_frozen);
  ManifoldConfig mc;
  mc.arc_target = o.arc;
  const HomoclinicSearch hs = search_homoclinic(map, cfg.params.b, o.period_max, mc);

  ordered_json summary{{"saddles_found", hs.saddles_found}, {"pairs_tried", hs.pairs_tried}};
  if (hs.saddles_found == 0) {
    summary["status"] = "no_saddle";
    summary["period_max"] = o.period_max;
    write_text_file_atomic(o.out, "curve,index,x,y,X,Y,angle\n");
    std::cout << summary.dump(2) << "\n";
    return kExitNumerical;
  }
  if (!hs.best) throw InverseFailed("no saddle admitted manifold growth: " + hs.last_error);

  const HomoclinicCandidate& c = *hs.best;
  write_text_file_atomic(o.out, manifolds_csv(map, c.unstable, c.stable, c.crossings));
  summary["status"] = c.complete ? "ok" : "incomplete";
  summary["saddle"] = fixed_point_json(c.saddle);
  auto seg_json = [](const ManifoldSegment& seg, double inv) {
    return ordered_json{{"arclength", seg.arclength}, {"points", seg.points.size()},
                        {"status", to_string(seg.status)}, {"invariance_error", inv}};
  };
  summary["unstable"] = seg_json(c.unstable, c.unstable_invariance);
  summary["stable"] = seg_json(c.stable, c.stable_invariance);
  summary["crossings"] = c.crossings.size();
  summary["transverse_crossings"] = c.transverse;
  std::cout << summary.dump(2) << "\n";
  return c.complete ? 0 : kExitNumerical;
}

int cmd_figure(const Options& o) {
  const FigurePreset fp = figure_preset(o.name);
  OrbitConfig oc;
  oc.burn = fp.burn;
  oc.samples = fp.samples;
  oc.project = true;
  return write_orbit(iterate_orbit(fp.params, fp.funcs, fp.ic, oc), o);
}

int cmd_sweep(const Options& o) {
  SweepSpec spec = load_sweep_spec(o.spec);
  spec.checkpoint = o.checkpoint;
  spec.output = o.out;
  SweepOptions so;
  so.workers = o.workers;
  so.stop_after_chunks = o.stop_after;
  const SweepResult res = resume_sweep(spec, so);
  std::cerr << fmt::format("chunks: {} total, {} computed, {} reused{}\n", res.chunks_total, res.chunks_computed,
                           res.chunks_reused, res.complete ? "" : " (incomplete, CSV not written)");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotating rank-one map laboratory"};
  app.require_subcommand(1);
  Options o;

  auto config = [&](CLI::App* c) { c->add_option("--config", o.config, "model config (JSON)")->required(); };
  auto ic = [&](CLI::App* c) {
    c->add_option("--x0", o.x0)->required();
    c->add_option("--y0", o.y0)->required();
    c->add_option("--t0", o.t0)->required();
  };

  auto* check = app.add_subcommand("check", "validate hypotheses H1-H6 and print a JSON report");
  config(check);
  check->add_flag("--strict", o.strict, "treat any failed hypothesis as a validation error");

  auto* orbit = app.add_subcommand("orbit", "iterate an orbit and write it as CSV");
  config(orbit);
  ic(orbit);
  orbit->add_option("--burn", o.burn)->required()->check(CLI::NonNegativeNumber);
  orbit->add_option("--samples", o.samples)->required()->check(CLI::NonNegativeNumber);
  orbit->add_option("--out", o.out)->required();
  orbit->add_option("--ppm", o.ppm, "also render the projected cloud");
  orbit->add_option("--width", o.width)->check(CLI::PositiveNumber);
  orbit->add_option("--height", o.height)->check(CLI::PositiveNumber);
  orbit->add_flag("--project", o.project, "add X = y cos x, Y = y sin x columns");

  auto* lyap = app.add_subcommand("lyapunov", "Lyapunov spectrum along an orbit");
  config(lyap);
  ic(lyap);
  lyap->add_option("--iters", o.iters)->required()->check(CLI::PositiveNumber);
  lyap->add_option("--qr-period", o.qr_period)->check(CLI::PositiveNumber);
  lyap->add_option("--out", o.out)->required();

  auto* rot = app.add_subcommand("rotation", "rotation number of the t-factor");
  config(rot);
  rot->add_option("--t0", o.t0);
  rot->add_option("--burn", o.burn)->check(CLI::NonNegativeNumber);
  rot->add_option("--iters", o.iters)->required()->check(CLI::PositiveNumber);
  rot->add_option("--qmax", o.qmax)->check(CLI::PositiveNumber);
  rot->add_option("--out", o.out)->required();

  auto* tongues = app.add_subcommand("tongues", "rotation-number raster over (alpha2, delta2)");
  config(tongues);
  tongues->add_option("--a2", o.a2, "<lo>:<hi>:<n>")->required();
  tongues->add_option("--d2", o.d2, "<lo>:<hi>:<n>")->required();
  tongues->add_option("--qmax", o.qmax)->check(CLI::PositiveNumber);
  tongues->add_option("--iters", o.iters, "iterations per cell")->default_val(2000)->check(CLI::PositiveNumber);
  tongues->add_option("--workers", o.workers)->check(CLI::PositiveNumber);
  tongues->add_option("--out", o.out)->required();

  auto* limit = app.add_subcommand("limit", "convergence of the rescaled map to its singular limit");
  config(limit);
  limit->add_option("--a", o.a)->required();
  limit->add_option("--nmax", o.nmax)->required()->check(CLI::PositiveNumber);
  limit->add_option("--grid", o.grid, "nx; ny = nx/4")->check(CLI::PositiveNumber);
  limit->add_option("--out", o.out)->required();

  auto* mis = app.add_subcommand("misiurewicz", "Misiurewicz and mixing diagnostics of the limit family");
  config(mis);
  mis->add_option("--a", o.a)->required();
  mis->add_option("--delta0", o.delta0)->check(CLI::PositiveNumber);
  mis->add_option("--horizon", o.horizon)->check(CLI::PositiveNumber);
  mis->add_option("--samples", o.misiurewicz_samples)->check(CLI::PositiveNumber);
  mis->add_option("--out", o.out)->required();

  auto* man = app.add_subcommand("manifolds", "saddle search, invariant manifolds and homoclinic crossings");
  config(man);
  man->add_option("--period-max", o.period_max)->check(CLI::PositiveNumber);
  man->add_option("--arc", o.arc)->required()->check(CLI::PositiveNumber);
  man->add_option("--t-frozen", o.t_frozen, "t at which the planar map is restricted");
  man->add_option("--out", o.out)->required();

  auto* fig = app.add_subcommand("figure", "reproduce a published orbit picture");
  fig->add_option("--name", o.name)->required()->check(CLI::IsMember({"fig5", "fig6", "fig7", "fig8"}));
  fig->add_option("--out", o.out)->required();
  fig->add_option("--ppm", o.ppm);
  fig->add_option("--width", o.width)->check(CLI::PositiveNumber);
  fig->add_option("--height", o.height)->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "checkpointed parameter-plane sweep");
  sweep->add_option("--spec", o.spec)->required();
  sweep->add_option("--checkpoint", o.checkpoint)->required();
  sweep->add_option("--workers", o.workers)->check(CLI::PositiveNumber);
  sweep->add_option("--out", o.out)->required();
  sweep->add_option("--stop-after-chunks", o.stop_after, "compute at most this many chunks, then stop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (check->parsed()) return cmd_check(o);
    if (orbit->parsed()) return cmd_orbit(o);
    if (lyap->parsed()) return cmd_lyapunov(o);
    if (rot->parsed()) return cmd_rotation(o);
    if (tongues->parsed()) return cmd_tongues(o);
    if (limit->parsed()) return cmd_limit(o);
    if (mis->parsed()) return cmd_misiurewicz(o);
    if (man->parsed()) return cmd_manifolds(o);
    if (fig->parsed()) return cmd_figure(o);
    if (sweep->parsed()) return cmd_sweep(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error";
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "validation error (" << e.hypothesis() << "): " << e.what() << "\n";
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitInput;
}
