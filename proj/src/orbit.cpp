#include "rankone/orbit.hpp"

#include <algorithm>

#include "rankone/errors.hpp"

namespace rankone {

bool in_band(const ModelParams& p, double y, double slack) {
  return y >= 1.0 - slack && y <= 1.0 + p.b + slack;
}

OrbitRun iterate_orbit(const ModelParams& p, const ModelFunctions& f, const PhaseState& s0,
                       const OrbitConfig& cfg) {
  OrbitRun run;
  run.first_index = cfg.burn + 1;
  run.project = cfg.project;
  run.states.reserve(static_cast<std::size_t>(std::max<long>(cfg.samples, 0)));

  PhaseState s{wrap_angle(s0.x), s0.y, wrap_angle(s0.t)};
  const long total = cfg.burn + cfg.samples;
  for (long n = 1; n <= total; ++n) {
    try {
      s = eval_map(p, f, s);
    } catch (const LogDomainError&) {
      run.escaped = true;
      run.escape_step = n;
      break;
    }
    if (!in_band(p, s.y, cfg.escape_slack)) {
      run.escaped = true;
      run.escape_step = n;
      break;
    }
    if (n > cfg.burn) run.states.push_back(s);
  }

  if (!run.states.empty()) {
    const std::size_t tail_n = std::max<std::size_t>(1, run.states.size() / 10);
    const auto first = run.states.end() - static_cast<std::ptrdiff_t>(tail_n);
    Box b{first->x, first->x, first->y, first->y, first->t, first->t};
    for (auto it = first; it != run.states.end(); ++it) {
      b.x_min = std::min(b.x_min, it->x);
      b.x_max = std::max(b.x_max, it->x);
      b.y_min = std::min(b.y_min, it->y);
      b.y_max = std::max(b.y_max, it->y);
      b.t_min = std::min(b.t_min, it->t);
      b.t_max = std::max(b.t_max, it->t);
    }
    run.tail = b;
  }
  return run;
}

LyapunovEstimate lyapunov_spectrum(const ModelParams& p, const ModelFunctions& f,
                                   const PhaseState& s0, const LyapunovConfig& cfg) {
  const ModelSystem sys{p, f, 0.5};
  return lyapunov_spectrum(sys, PhaseState{wrap_angle(s0.x), s0.y, wrap_angle(s0.t)}, cfg);
}

}  // namespace rankone
