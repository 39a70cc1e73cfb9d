#pragma once

#include <optional>
#include <vector>

#include "rankone/lyapunov.hpp"
#include "rankone/model.hpp"

namespace rankone {

struct OrbitConfig {
  long burn = 0;
  long samples = 0;
  double escape_slack = 0.5;  // μ: y must stay in [1-μ, 1+b+μ]
  bool project = false;       // emit X = y cos x, Y = y sin x
};

struct Box {
  double x_min = 0, x_max = 0;
  double y_min = 0, y_max = 0;
  double t_min = 0, t_max = 0;
};

struct OrbitRun {
  std::vector<PhaseState> states;  // post-burn states
  long first_index = 0;            // iteration index n of states[0]
  bool escaped = false;
  std::optional<long> escape_step;
  Box tail;                        // bounding box of the last 10% of states
  bool project = false;
};

bool in_band(const ModelParams& p, double y, double slack);

/// Applies eval_map burn + samples times from s0 and records the post-burn
/// states (iterates burn+1 .. burn+samples). Stops early, with the escape
/// flag set, on LogDomain or when y leaves the slack band.
OrbitRun iterate_orbit(const ModelParams& p, const ModelFunctions& f, const PhaseState& s0,
                       const OrbitConfig& cfg);

/// The three-dimensional map as a TangentSystem.
struct ModelSystem {
  static constexpr int kDim = 3;
  using State = PhaseState;

  ModelParams params;
  ModelFunctions funcs;
  double escape_slack = 0.5;

  State step(const State& s) const { return eval_map(params, funcs, s); }
  Jacobian3 jacobian(const State& s) const { return eval_jacobian(params, funcs, s); }
  bool escaped(const State& s) const { return !in_band(params, s.y, escape_slack); }
};

/// Lyapunov spectrum of F along the orbit of s0. On escape the partial
/// estimate is returned with the escape flag set.
LyapunovEstimate lyapunov_spectrum(const ModelParams& p, const ModelFunctions& f,
                                   const PhaseState& s0, const LyapunovConfig& cfg);

}  // namespace rankone
