#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rankone/circle.hpp"
#include "rankone/model.hpp"

namespace rankone {

enum class SweepQuantity { rho, lambda1 };

struct SweepAxis {
  std::string name;  // alpha2, delta2, eps1 or eps2
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;

  Axis grid() const { return Axis{lo, hi, n}; }
};

/// A two-parameter raster. Cell (i, j) has p1 = axes[0].at(i), p2 = axes[1].at(j)
/// and index j * n1 + i (row-major over the second axis).
struct SweepSpec {
  SweepQuantity quantity = SweepQuantity::rho;
  std::array<SweepAxis, 2> axes;
  ModelParams params;
  ModelFunctions funcs = ModelFunctions::sine_family();
  long budget = 1000;   // iterations per cell
  int q_max = 12;       // rho sweeps only
  long chunk_size = 256;
  std::string output;
  std::string checkpoint;

  long cell_count() const { return static_cast<long>(axes[0].n) * axes[1].n; }
  long chunk_count() const { return (cell_count() + chunk_size - 1) / chunk_size; }
};

/// Throws SpecInvalid when the axes, budget or chunk size are unusable.
void validate_spec(const SweepSpec& spec);

/// 16-byte digest (truncated SHA-256) over every field that affects results:
/// quantity, axes, parameters, function coefficients, budget, q_max, chunk
/// size. Output paths and worker count are excluded.
using SpecHash = std::array<std::uint8_t, 16>;
SpecHash spec_hash(const SweepSpec& spec);
std::string to_hex(const SpecHash& h);

struct SweepCell {
  double value = 0.0;  // rho or lambda1
  std::int32_t locked_p = -1;
  std::int32_t locked_q = -1;
  std::uint8_t status = 0;  // see cell_status_name

  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

/// rho: 0 ok, 1 invalid (above the H5 threshold).
/// lambda1: 0 ok, 1 escaped, 2 numerical error.
std::string cell_status_name(SweepQuantity q, std::uint8_t status);

/// The single-shot computation behind cell (i, j).
SweepCell compute_cell(const SweepSpec& spec, int i, int j);

/// Lyapunov cells start here.
PhaseState sweep_initial_state(const ModelParams& p);

struct SweepOptions {
  int workers = 1;
  /// Compute at most this many chunks, then return without writing the CSV.
  std::optional<long> stop_after_chunks;
};

struct SweepResult {
  long chunks_total = 0;
  long chunks_computed = 0;
  long chunks_reused = 0;
  bool complete = false;  // CSV written
};

/// Computes every chunk (overwriting existing tiles) and writes the CSV.
SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opt = {});

/// Reuses tiles in the checkpoint directory, computes the rest, writes the
/// CSV. Throws SpecMismatch if any tile carries a different spec hash.
SweepResult resume_sweep(const SweepSpec& spec, const SweepOptions& opt = {});

std::filesystem::path tile_path(const SweepSpec& spec, long chunk);

struct SweepTile {
  SpecHash hash{};
  std::uint64_t chunk = 0;
  std::vector<SweepCell> cells;
};

void write_tile(const std::filesystem::path& path, const SweepTile& tile);
SweepTile read_tile(const std::filesystem::path& path);

/// JSON spec document: {"quantity", "axes": [{name, lo, hi, n}, ...],
/// "params", "functions", "budget", "q_max", "chunk_size", "output",
/// "checkpoint"}. Throws ParseError / SpecInvalid.
SweepSpec parse_sweep_spec(const std::string& text);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

}  // namespace rankone
