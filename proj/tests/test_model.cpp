#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "rankone/errors.hpp"
#include "rankone/model.hpp"
#include "rankone/presets.hpp"

using namespace rankone;

namespace {

ModelParams uncoupled() {
  ModelParams p;
  p.eps1 = 0.0;
  p.eps2 = 0.0;
  p.alpha1 = 0.0;
  p.delta1 = 1.0;
  p.delta = 2.0;
  p.alpha2 = std::numbers::pi;
  p.delta2 = 0.0;
  return p;
}

Jacobian3 central_difference(const ModelParams& p, const ModelFunctions& f, const PhaseState& s) {
  const double h = 1e-6;
  Jacobian3 J;
  for (int c = 0; c < 3; ++c) {
    PhaseState a = s, b = s;
    (c == 0 ? a.x : c == 1 ? a.y : a.t) += h;
    (c == 0 ? b.x : c == 1 ? b.y : b.t) -= h;
    const PhaseState fa = eval_map_lift(p, f, a), fb = eval_map_lift(p, f, b);
    J.col(c) << (fa.x - fb.x) / (2 * h), (fa.y - fb.y) / (2 * h), (fa.t - fb.t) / (2 * h);
  }
  return J;
}

}  // namespace

TEST_CASE("one step of the uncoupled sine family") {
  const PhaseState out = eval_map(uncoupled(), ModelFunctions::sine_family(), {0.0, 1.5, 0.0});
  CHECK(out.x == doctest::Approx(std::log(0.5) + kTwoPi).epsilon(1e-14));
  CHECK(out.x == doctest::Approx(5.5900381).epsilon(1e-7));
  CHECK(out.y == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(out.t == doctest::Approx(std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("one step from the fig5 initial condition") {
  const FigurePreset fp = figure_preset("fig5");
  const PhaseState out = eval_map(fp.params, fp.funcs, fp.ic);
  CHECK(std::abs(out.x - 3.800491338501236) <= 1e-12);
  CHECK(std::abs(out.y - 1.260640003457888) <= 1e-12);
  CHECK(std::abs(out.t - 3.72715) <= 1e-12);
}

TEST_CASE("log argument at zero raises LogDomainError") {
  CHECK_THROWS_AS(eval_map(uncoupled(), ModelFunctions::sine_family(), {0.3, 1.0, 0.0}), LogDomainError);
}

TEST_CASE("planar map agrees with the first two components") {
  const FigurePreset fp = figure_preset("fig8");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), rad(1.0, 1.5);
  for (int i = 0; i < 100; ++i) {
    const PhaseState s{ang(rng), rad(rng), ang(rng)};
    const PhaseState full = eval_map(fp.params, fp.funcs, s);
    const Vec2 planar = eval_planar(fp.params, fp.funcs, s.x, s.y, s.t);
    CHECK(planar.x() == full.x);
    CHECK(planar.y() == full.y);
  }
}

TEST_CASE("planar image at the stable two-orbit of the fig7 circle factor") {
  const FigurePreset fp = figure_preset("fig7");
  const Vec2 z = eval_planar(fp.params, fp.funcs, fp.ic.x, fp.ic.y, 0.4929545269428351);
  CHECK(std::abs(z.x() - 6.244095029523257) <= 1e-9);
  CHECK(std::abs(z.y() - 1.559127821723895) <= 1e-9);
}

TEST_CASE("radial component ignores t when eps2 vanishes") {
  ModelParams p = uncoupled();
  for (double t : {0.0, 1.0, 4.0}) CHECK(eval_planar(p, ModelFunctions::sine_family(), 0.2, 1.5, t).y() == 1.25);
  p = figure_preset("fig5").params;
  const Vec2 a = eval_planar(p, ModelFunctions::sine_family(), 2.0, 1.2, 0.1);
  const Vec2 b = eval_planar(p, ModelFunctions::sine_family(), 2.0, 1.2, 5.0);
  CHECK(a == b);
}

TEST_CASE("Jacobian of the uncoupled map at y = 1.5") {
  const Jacobian3 J = eval_jacobian(uncoupled(), ModelFunctions::sine_family(), {0.4, 1.5, 0.2});
  Jacobian3 expected;
  expected << 1, 2, 0, 0, 1, 0, 0, 0, 1;
  CHECK((J - expected).norm() <= 1e-14);
  CHECK(J.determinant() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("no t-dependence in the Jacobian when eps2 vanishes") {
  const FigurePreset fp = figure_preset("fig6");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), rad(1.0, 1.5);
  for (int i = 0; i < 50; ++i) {
    const Jacobian3 J = eval_jacobian(fp.params, fp.funcs, {ang(rng), rad(rng), ang(rng)});
    CHECK(J(0, 2) == 0.0);
    CHECK(J(1, 2) == 0.0);
  }
}

TEST_CASE("analytic Jacobian matches central differences on every preset") {
  std::mt19937_64 rng(3);
  for (const std::string& name : preset_names()) {
    const FigurePreset fp = figure_preset(name);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi), rad(1.0, 1.0 + fp.params.b);
    for (int i = 0; i < 100; ++i) {
      const PhaseState s{ang(rng), rad(rng), ang(rng)};
      const Jacobian3 J = eval_jacobian(fp.params, fp.funcs, s);
      CHECK((J - central_difference(fp.params, fp.funcs, s)).norm() <= 1e-6 * std::max(1.0, J.norm()));
    }
  }
}

// Long products are too ill-conditioned for a direct determinant; the
// exponent-sum identity covers long runs.
TEST_CASE("determinant of the n-step Jacobian telescopes") {
  for (const char* name : {"fig5", "fig6", "fig8"}) {
    const FigurePreset fp = figure_preset(name);
    PhaseState s = fp.ic;
    Jacobian3 D = Jacobian3::Identity();
    double prod = 1.0;
    for (int n = 1; n <= 3; ++n) {
      const Jacobian3 J = eval_jacobian(fp.params, fp.funcs, s);
      D = J * D;
      prod *= J.determinant();
      s = eval_map(fp.params, fp.funcs, s);
      CHECK(std::abs(D.determinant() - prod) <= 1e-8 * std::abs(prod));
    }
  }
}

TEST_CASE("angles are reduced and the map is periodic in x") {
  const FigurePreset fp = figure_preset("fig8");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), rad(1.0, 1.5);
  for (int i = 0; i < 200; ++i) {
    const PhaseState s{ang(rng), rad(rng), ang(rng)};
    const PhaseState a = eval_map(fp.params, fp.funcs, s);
    const PhaseState b = eval_map(fp.params, fp.funcs, {s.x + kTwoPi, s.y, s.t});
    CHECK(a.x >= 0.0);
    CHECK(a.x < kTwoPi);
    CHECK(a.t >= 0.0);
    CHECK(a.t < kTwoPi);
    CHECK(circle_distance(a.x, b.x) <= 1e-12);
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-14));
  }
}

TEST_CASE("H5 threshold of the sine family") {
  ModelParams p = figure_preset("fig6").params;
  const ModelFunctions f = ModelFunctions::sine_family();
  const HypothesisReport rep = validate(p, f);
  CHECK(std::abs(rep.sup_log_deriv_psi3 - 2.1821789023599238) <= 1e-9);
  CHECK(std::abs(rep.delta2_threshold - 0.458257569495584) <= 1e-9);
  CHECK(rep.check("H5").pass);
  CHECK(rep.all_pass());
  p.delta2 = 0.5;
  CHECK_FALSE(validate(p, f).check("H5").pass);
}

TEST_CASE("constant psi3 puts no bound on delta2") {
  ModelParams p = figure_preset("fig6").params;
  ModelFunctions f = ModelFunctions::sine_family();
  f.psi3 = TrigPoly::constant(1.0);
  p.delta2 = 0.9;
  const HypothesisReport rep = validate(p, f);
  CHECK(rep.sup_log_deriv_psi3 == 0.0);
  CHECK(rep.check("H5").pass);
}

TEST_CASE("hypothesis report lists H1 to H6 and flags a large eps1") {
  ModelParams p = figure_preset("fig5").params;
  const HypothesisReport ok = validate(p, ModelFunctions::sine_family());
  REQUIRE(ok.checks.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(ok.checks[i].name == "H" + std::to_string(i + 1));
  p.eps1 = 1.5;
  CHECK_FALSE(validate(p, ModelFunctions::sine_family()).check("H1").pass);
}

TEST_CASE("dissipativity grid of the uncoupled map") {
  DissipativityGrid g;
  g.nx = 16;
  g.ny = 11;
  g.nt = 4;
  g.y_lo = 1.4;
  g.y_hi = 1.5;
  const DissipativityReport rep = diagnose_dissipativity(uncoupled(), ModelFunctions::sine_family(), g);
  CHECK(rep.max_dF2_dy == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.skipped == 0);
}

TEST_CASE("dissipativity of the fig5 band scales with eps1") {
  const FigurePreset fp = figure_preset("fig5");
  DissipativityGrid g;
  g.y_hi = 1.0 + fp.params.b;
  const DissipativityReport rep = diagnose_dissipativity(fp.params, fp.funcs, g);
  CHECK(rep.max_dF2_dy > 0.0);
  CHECK(rep.max_dF2_dy <= 2.0 * (fp.params.b + fp.params.eps1 * 2.1));
  CHECK(rep.distortion >= 1.0);
}
