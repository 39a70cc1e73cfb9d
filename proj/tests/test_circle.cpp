#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "rankone/circle.hpp"
#include "rankone/errors.hpp"
#include "rankone/model.hpp"
#include "rankone/presets.hpp"

using namespace rankone;

namespace {

const TrigPoly kSine = ModelFunctions::sine_family().psi3;

}  // namespace

TEST_CASE("lift values") {
  CHECK(std::abs(CircleMap(0.0, 0.2, kSine).lift(0.0) - 0.019062035960864972) <= 1e-15);
  const CircleMap rigid(1.3, 0.0, kSine);
  for (double t : {-2.0, 0.0, 0.7, 5.0}) CHECK(rigid.lift(t) == doctest::Approx(t + 1.3).epsilon(1e-15));
}

TEST_CASE("lift has degree one") {
  const CircleMap map(2.0, 0.3, kSine);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = u(rng);
    CHECK(std::abs(map.lift(t + kTwoPi) - map.lift(t) - kTwoPi) <= 1e-12);
  }
}

TEST_CASE("rigid rotation by a quarter turn") {
  const RotationEstimate est = rotation_number(CircleMap(std::numbers::pi / 2, 0.0, kSine), 0.4, 0, 10000);
  CHECK(std::abs(est.rho - 0.25) <= 1e-9);
}

TEST_CASE("locked fixed point inside the 0/1 tongue") {
  const RotationEstimate est = rotation_number(CircleMap(0.1, 0.2, kSine), 0.0, 100, 10000);
  REQUIRE(est.locked);
  CHECK(est.locked->p == 0);
  CHECK(est.locked->q == 1);
  CHECK(circle_distance(kTwoPi * est.rho, 0.0) <= 1e-3);
}

TEST_CASE("fig6 circle factor rotates without locking") {
  const FigurePreset fp = figure_preset("fig6");
  const RotationEstimate est =
      rotation_number(CircleMap(fp.params.alpha2, fp.params.delta2, fp.funcs.psi3), fp.ic.t, 0, 1'000'000);
  CHECK(std::abs(est.rho - 0.706759) <= 1e-4);
  CHECK_FALSE(est.locked);
}

TEST_CASE("rotation number does not depend on the base point") {
  const CircleMap map(2.5, 0.3, kSine);
  const long n = 20000;
  const double ref = rotation_number(map, 0.0, 0, n).lift_rho;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(rotation_number(map, u(rng), 0, n).lift_rho - ref) <= 2.0 / n);
}

TEST_CASE("non-injective circle map is refused") {
  CHECK_THROWS_AS(rotation_number(CircleMap(1.0, 0.5, kSine), 0.0, 0, 100), H5Violated);
  CHECK_THROWS_AS(find_periodic_orbits(CircleMap(1.0, 0.5, kSine), 0, 1), H5Violated);
}

TEST_CASE("rho is nondecreasing along a scan row") {
  const TongueGrid grid = tongue_scan(kSine, {0.0, 5.5, 111}, {0.3, 0.3, 1}, 12, 4000);
  for (int i = 1; i < grid.alpha2.n; ++i) CHECK(grid.at(i, 0).rho >= grid.at(i - 1, 0).rho - 2.0 / 4000);
}

TEST_CASE("fixed points of the 0/1 branch at delta2 = 0.2") {
  const PeriodicOrbitSearch s = find_periodic_orbits(CircleMap(0.0, 0.2, kSine), 0, 1);
  REQUIRE(s.orbits.size() == 2);
  const PeriodicOrbit& a = s.orbits[0].points[0] < s.orbits[1].points[0] ? s.orbits[0] : s.orbits[1];
  const PeriodicOrbit& b = &a == &s.orbits[0] ? s.orbits[1] : s.orbits[0];
  CHECK(std::abs(a.points[0] - 3.241760074751353) <= 1e-10);
  CHECK(std::abs(a.multiplier - 0.801002512578676) <= 1e-9);
  CHECK(a.stable);
  CHECK(std::abs(b.points[0] - 6.183017886018027) <= 1e-10);
  CHECK(std::abs(b.multiplier - 1.198997487421324) <= 1e-9);
  CHECK_FALSE(b.stable);
}

TEST_CASE("periodic orbits come in pairs with alternating stability") {
  for (auto [a2, d2, p, q] : {std::tuple{3.1, 0.3, 1, 2}, std::tuple{2.1, 0.35, 1, 3}, std::tuple{0.05, 0.1, 0, 1}}) {
    const PeriodicOrbitSearch s = find_periodic_orbits(CircleMap(a2, d2, kSine), p, q);
    CHECK(s.roots.size() % 2 == 0);
    for (std::size_t i = 1; i < s.orbits.size(); ++i)
      CHECK((std::abs(s.orbits[i].multiplier) < 1.0) != (std::abs(s.orbits[i - 1].multiplier) < 1.0));
  }
}

TEST_CASE("irrational rigid rotation has no periodic points") {
  CHECK(find_periodic_orbits(CircleMap(1.0, 0.0, kSine), 0, 1).orbits.empty());
  for (int q = 2; q <= 5; ++q) CHECK(find_periodic_orbits(CircleMap(1.0, 0.0, kSine), 1, q).orbits.empty());
}

TEST_CASE("fig7 circle factor is close to a 2-orbit") {
  const FigurePreset fp = figure_preset("fig7");
  const CircleMap map(fp.params.alpha2, fp.params.delta2, fp.funcs.psi3);
  const PeriodicOrbitSearch s = find_periodic_orbits(map, 1, 2);
  CHECK(s.min_abs_residual < 1e-3);
  bool found = false;
  for (const PeriodicOrbit& o : s.orbits)
    for (double t : o.points) found = found || (o.stable && std::abs(t - 0.4929545269428351) <= 1e-9);
  CHECK(found);
}

TEST_CASE("0/1 tongue width is linear in delta2") {
  const double expected = std::log(2.1) - std::log(0.1);
  CHECK(std::abs(expected - 3.044522437723423) <= 1e-15);
  std::vector<double> widths;
  for (double d : {0.05, 0.1, 0.2}) {
    const Interval iv = tongue_boundary(kSine, 0, 1, d, {-1.0, 1.0});
    CHECK(std::abs(iv.width() - expected * d) <= 1e-6);
    CHECK(std::abs(iv.lo + d * std::log(2.1)) <= 1e-6);
    widths.push_back(iv.width());
  }
  CHECK(std::abs(widths[1] / widths[0] - 2.0) <= 1e-6);
  CHECK(std::abs(widths[2] / widths[0] - 4.0) <= 1e-6);
}

TEST_CASE("tongues collapse at zero coupling") {
  for (int q = 1; q <= 4; ++q) {
    const DisplacementRange r = displacement_range(CircleMap(1.0, 0.0, kSine), 0, q);
    CHECK(r.max - r.min <= 1e-12);
  }
  CHECK_THROWS_AS(tongue_boundary(kSine, 0, 1, 0.2, {0.5, 1.0}), NotBracketed);
}

TEST_CASE("scan cells at zero coupling and inside the 0/1 tongue") {
  const TongueGrid grid = tongue_scan(kSine, {0.1, 2.0, 2}, {0.0, 0.2, 2}, 12, 5000);
  CHECK(std::abs(grid.at(0, 0).rho - 0.1 / kTwoPi) <= 1e-9);
  CHECK(std::abs(grid.at(1, 0).rho - 2.0 / kTwoPi) <= 1e-9);
  CHECK_FALSE(grid.at(0, 0).locked);
  REQUIRE(grid.at(0, 1).locked);
  CHECK(grid.at(0, 1).locked->q == 1);
  CHECK(grid.at(0, 1).locked->p == 0);
}

TEST_CASE("scan cells above the H5 threshold are invalid") {
  const TongueGrid grid = tongue_scan(kSine, {1.0, 1.0, 1}, {0.5, 0.5, 1}, 12, 100);
  CHECK_FALSE(grid.at(0, 0).valid);
}

TEST_CASE("scan result does not depend on the worker count") {
  const TongueGrid a = tongue_scan(kSine, {0.0, kTwoPi, 40}, {0.0, 0.45, 20}, 12, 500, 1);
  const TongueGrid b = tongue_scan(kSine, {0.0, kTwoPi, 40}, {0.0, 0.45, 20}, 12, 500, 4);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].rho == b.cells[i].rho);
    CHECK(a.cells[i].locked == b.cells[i].locked);
  }
}
