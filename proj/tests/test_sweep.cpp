#include <cmath>
#include <filesystem>
#include <random>

#include <doctest.h>
#include <fmt/format.h>

#include "rankone/config.hpp"
#include "rankone/errors.hpp"
#include "rankone/orbit.hpp"
#include "rankone/presets.hpp"
#include "rankone/sweep.hpp"

using namespace rankone;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / fmt::format("rankone_sweep_{:x}", std::random_device{}())) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

SweepSpec rho_spec(const fs::path& dir, const std::string& tag, int n1 = 24, int n2 = 16) {
  SweepSpec s;
  s.quantity = SweepQuantity::rho;
  s.axes = {SweepAxis{"alpha2", 0.0, kTwoPi, n1}, SweepAxis{"delta2", 0.0, 0.4, n2}};
  s.params = figure_preset("fig6").params;
  s.budget = 500;
  s.chunk_size = 50;
  s.output = (dir / (tag + ".csv")).string();
  s.checkpoint = (dir / tag).string();
  return s;
}

}  // namespace

TEST_CASE("rho cells at zero coupling are the rigid rotation") {
  TempDir tmp;
  SweepSpec s = rho_spec(tmp.path, "rigid", 2, 2);
  s.axes[0] = {"alpha2", 0.5, 2.0, 2};
  s.budget = 20000;
  for (int i = 0; i < 2; ++i) {
    const SweepCell c = compute_cell(s, i, 0);
    CHECK(std::abs(c.value - s.axes[0].grid().at(i) / kTwoPi) <= 1e-9);
    CHECK(c.locked_q == -1);
  }
}

TEST_CASE("cells equal the single-shot computation") {
  TempDir tmp;
  const SweepSpec s = rho_spec(tmp.path, "cells", 5, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 5; ++i) {
      const TongueCell t = tongue_cell(
          CircleMap(s.axes[0].grid().at(i), s.axes[1].grid().at(j), s.funcs.psi3), s.q_max, s.budget);
      const SweepCell c = compute_cell(s, i, j);
      CHECK(c.value == t.rho);
      CHECK(c.status == (t.valid ? 0 : 1));
      CHECK(c.locked_q == (t.locked ? t.locked->q : -1));
    }

  SweepSpec l = s;
  l.quantity = SweepQuantity::lambda1;
  l.axes = {SweepAxis{"eps1", 0.08, 0.12, 3}, SweepAxis{"alpha2", 1.0, 2.0, 2}};
  l.budget = 2000;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 3; ++i) {
      ModelParams p = l.params;
      p.eps1 = l.axes[0].grid().at(i);
      p.alpha2 = l.axes[1].grid().at(j);
      LyapunovConfig lc;
      lc.iters = l.budget;
      lc.qr_period = 10;
      lc.history_stride = 0;
      const LyapunovEstimate est = lyapunov_spectrum(p, l.funcs, sweep_initial_state(p), lc);
      const SweepCell c = compute_cell(l, i, j);
      CHECK(c.status == 0);
      CHECK(c.value == est.exponents[0]);
    }
}

TEST_CASE("output does not depend on workers, chunking or interruption") {
  TempDir tmp;
  SweepSpec a = rho_spec(tmp.path, "a");
  run_sweep(a, {1, {}});
  const std::string ref = read_text_file(a.output);
  CHECK(ref.rfind("alpha2,delta2,rho,locked_p,locked_q,valid\n", 0) == 0);
  CHECK(std::count(ref.begin(), ref.end(), '\n') == 1 + 24 * 16);

  SweepSpec b = rho_spec(tmp.path, "b");
  run_sweep(b, {4, {}});
  CHECK(read_text_file(b.output) == ref);

  SweepSpec c = rho_spec(tmp.path, "c");
  c.chunk_size = 7;
  run_sweep(c, {3, {}});
  CHECK(read_text_file(c.output) == ref);

  SweepSpec d = rho_spec(tmp.path, "d");
  const SweepResult first = run_sweep(d, {2, 4});
  CHECK_FALSE(first.complete);
  CHECK(first.chunks_computed == 4);
  CHECK_FALSE(fs::exists(d.output));
  const SweepResult rest = resume_sweep(d, {4, {}});
  CHECK(rest.complete);
  CHECK(rest.chunks_reused == 4);
  CHECK(rest.chunks_computed == rest.chunks_total - 4);
  CHECK(read_text_file(d.output) == ref);
}

TEST_CASE("resume from an empty checkpoint matches a fresh run") {
  TempDir tmp;
  SweepSpec a = rho_spec(tmp.path, "fresh");
  run_sweep(a);
  SweepSpec b = rho_spec(tmp.path, "resumed");
  const SweepResult r = resume_sweep(b);
  CHECK(r.chunks_reused == 0);
  CHECK(read_text_file(b.output) == read_text_file(a.output));
}

TEST_CASE("resume with a changed budget is refused") {
  TempDir tmp;
  SweepSpec s = rho_spec(tmp.path, "m");
  run_sweep(s, {1, 2});
  s.budget = 600;
  CHECK_THROWS_AS(resume_sweep(s), SpecMismatch);
}

TEST_CASE("lambda sweep writes its own header") {
  TempDir tmp;
  SweepSpec s = rho_spec(tmp.path, "lambda", 3, 2);
  s.quantity = SweepQuantity::lambda1;
  s.axes = {SweepAxis{"eps1", 0.08, 0.12, 3}, SweepAxis{"eps2", 0.0, 0.0, 1}};
  s.budget = 500;
  run_sweep(s, {2, {}});
  const std::string csv = read_text_file(s.output);
  CHECK(csv.rfind("p1,p2,lambda1,status\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("spec hash covers results and ignores paths") {
  TempDir tmp;
  const SweepSpec base = rho_spec(tmp.path, "h");
  SweepSpec moved = base;
  moved.output = "/elsewhere.csv";
  moved.checkpoint = "/elsewhere";
  CHECK(spec_hash(moved) == spec_hash(base));
  SweepSpec budget = base;
  budget.budget += 1;
  CHECK(spec_hash(budget) != spec_hash(base));
  SweepSpec coeff = base;
  coeff.funcs.psi3.c0 = 1.2;
  CHECK(spec_hash(coeff) != spec_hash(base));
  SweepSpec axis = base;
  axis.axes[1].hi = 0.41;
  CHECK(spec_hash(axis) != spec_hash(base));
  CHECK(to_hex(spec_hash(base)).size() == 32);
}

TEST_CASE("tiles round-trip") {
  TempDir tmp;
  SweepTile t;
  t.hash = spec_hash(rho_spec(tmp.path, "t"));
  t.chunk = 3;
  t.cells = {SweepCell{0.25, 1, 4, 0}, SweepCell{std::nan(""), -1, -1, 1}};
  const fs::path p = tmp.path / "tile.bin";
  write_tile(p, t);
  const SweepTile back = read_tile(p);
  CHECK(back.hash == t.hash);
  CHECK(back.chunk == 3);
  REQUIRE(back.cells.size() == 2);
  CHECK(back.cells[0] == t.cells[0]);
  CHECK(std::isnan(back.cells[1].value));
  CHECK(back.cells[1].status == 1);
}

TEST_CASE("invalid specs are rejected") {
  TempDir tmp;
  SweepSpec s = rho_spec(tmp.path, "bad");
  SweepSpec swapped = s;
  std::swap(swapped.axes[0], swapped.axes[1]);
  CHECK_THROWS_AS(validate_spec(swapped), SpecInvalid);
  SweepSpec unknown = s;
  unknown.axes[0].name = "b";
  CHECK_THROWS_AS(validate_spec(unknown), SpecInvalid);
  SweepSpec empty = s;
  empty.axes[1].n = 0;
  CHECK_THROWS_AS(validate_spec(empty), SpecInvalid);
  SweepSpec chunk = s;
  chunk.chunk_size = 0;
  CHECK_THROWS_AS(validate_spec(chunk), SpecInvalid);
}

TEST_CASE("sweep spec documents") {
  const std::string text = R"({
  "quantity": "rho",
  "axes": [{"name": "alpha2", "lo": 0, "hi": 6.283185307179586, "n": 8},
           {"name": "delta2", "lo": 0, "hi": 0.4, "n": 4}],
  "params": {"eps1": 0.1, "eps2": 0, "alpha1": 6.2832, "alpha2": 4.4407,
             "delta": 2, "delta1": 10, "delta2": 0.001, "b": 0.5},
  "budget": 300,
  "q_max": 8,
  "chunk_size": 5,
  "output": "out.csv",
  "checkpoint": "tiles"
})";
  const SweepSpec s = parse_sweep_spec(text);
  CHECK(s.quantity == SweepQuantity::rho);
  CHECK(s.axes[0].n == 8);
  CHECK(s.budget == 300);
  CHECK(s.q_max == 8);
  CHECK(s.chunk_size == 5);
  CHECK(s.funcs == ModelFunctions::sine_family());
  CHECK(s.params.delta1 == 10.0);

  std::string bad = text;
  bad.replace(bad.find("\"budget\""), 8, "\"budgie\"");
  try {
    parse_sweep_spec(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
  }
}
