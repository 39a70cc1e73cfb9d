#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace rankone {

/// A map together with its tangent map. step() may throw to signal that the
/// orbit left the domain; escaped() is checked after every step.
template <class S>
concept TangentSystem = requires(const S& sys, const typename S::State& s) {
  { S::kDim } -> std::convertible_to<int>;
  { sys.step(s) } -> std::convertible_to<typename S::State>;
  { sys.jacobian(s) } -> std::convertible_to<Eigen::Matrix<double, S::kDim, S::kDim>>;
  { sys.escaped(s) } -> std::convertible_to<bool>;
};

struct LyapunovConfig {
  long iters = 100000;
  int qr_period = 10;
  long burn = 0;
  long history_stride = 1000;
};

struct LyapunovHistoryEntry {
  long iter = 0;
  std::vector<double> exponents;
};

struct LyapunovEstimate {
  std::vector<double> exponents;  // descending, per iterate, natural log
  int qr_period = 0;
  long iters = 0;                 // completed iterations
  double mean_log_det = 0.0;      // time average of ln|det DF|
  std::vector<LyapunovHistoryEntry> history;
  bool escaped = false;
  std::optional<long> escape_step;

  double sum() const {
    double s = 0.0;
    for (double e : exponents) s += e;
    return s;
  }
};

namespace detail {

// Cofactor matrix: propagates bivectors (represented by their cross-product
// vector) under a linear map, cof(J)(u × v) = (Ju) × (Jv).
inline Eigen::Matrix3d cofactor(const Eigen::Matrix3d& J) {
  Eigen::Matrix3d c;
  c.col(0) = J.col(1).cross(J.col(2));
  c.col(1) = J.col(2).cross(J.col(0));
  c.col(2) = J.col(0).cross(J.col(1));
  return c;
}

}  // namespace detail

/// Lyapunov spectrum from exterior powers of the tangent map.
///
/// Partial sums λ1, λ1+λ2, ..., are the growth rates of a vector, a bivector
/// and the volume form, each propagated on its own and renormalised every
/// qr_period steps. Each is a single-vector growth, so nothing is lost to the
/// cancellation that Gram-Schmidt suffers when the frame spans exponents
/// e^{(λ1-λN)·period} apart. The initial frame is the standard basis, which
/// keeps invariant coordinate blocks exact.
template <TangentSystem Sys>
LyapunovEstimate lyapunov_spectrum(const Sys& sys, typename Sys::State s, const LyapunovConfig& cfg) {
  constexpr int N = Sys::kDim;
  static_assert(N == 2 || N == 3, "exterior-power engine implemented for dimensions 2 and 3");
  using Vec = Eigen::Matrix<double, N, 1>;

  LyapunovEstimate est;
  est.qr_period = std::max(1, cfg.qr_period);

  auto safe_step = [&](typename Sys::State& st) -> bool {
    try {
      st = sys.step(st);
    } catch (...) {
      return false;
    }
    return !sys.escaped(st);
  };

  for (long i = 0; i < cfg.burn; ++i) {
    if (!safe_step(s)) {
      est.escaped = true;
      est.escape_step = i + 1;
      est.exponents.assign(N, std::nan(""));
      return est;
    }
  }

  Vec v = Vec::Unit(0);
  Eigen::Vector3d w = Eigen::Vector3d::UnitZ();  // e1 ∧ e2, used when N == 3
  double log_v = 0.0, log_w = 0.0, log_det = 0.0;

  auto renormalise = [&] {
    const double nv = v.norm();
    log_v += std::log(nv);
    v /= nv;
    if constexpr (N == 3) {
      const double nw = w.norm();
      log_w += std::log(nw);
      w /= nw;
    }
  };
  auto current = [&](long n) {
    // Pending growth since the last renormalisation is included.
    const double lv = log_v + std::log(v.norm());
    std::vector<double> e;
    if constexpr (N == 3) {
      const double lw = log_w + std::log(w.norm());
      e = {lv / n, (lw - lv) / n, (log_det - lw) / n};
    } else {
      e = {lv / n, (log_det - lv) / n};
    }
    std::sort(e.begin(), e.end(), std::greater<>());
    return e;
  };

  long n = 0;
  for (; n < cfg.iters; ++n) {
    Eigen::Matrix<double, N, N> J;
    try {
      J = sys.jacobian(s);
    } catch (...) {
      est.escaped = true;
      est.escape_step = cfg.burn + n + 1;
      break;
    }
    v = J * v;
    if constexpr (N == 3) w = detail::cofactor(J) * w;
    log_det += std::log(std::abs(J.determinant()));
    if (!safe_step(s)) {
      est.escaped = true;
      est.escape_step = cfg.burn + n + 1;
      ++n;
      break;
    }
    const long done = n + 1;
    bool out_of_range = false;
    if constexpr (N == 3) out_of_range = !(w.norm() > 1e-150 && w.norm() < 1e150);
    out_of_range = out_of_range || !(v.norm() > 1e-150 && v.norm() < 1e150);
    if (done % est.qr_period == 0 || out_of_range) renormalise();
    if (cfg.history_stride > 0 && done % cfg.history_stride == 0)
      est.history.push_back({done, current(done)});
  }

  est.iters = n;
  if (n == 0) {
    est.exponents.assign(N, std::nan(""));
    return est;
  }
  est.mean_log_det = log_det / n;
  est.exponents = current(n);
  return est;
}

/// x ↦ A x on R^3. Exact exponents ln|eigenvalues| for diagonal A.
struct LinearDiagnosticMap3 {
  static constexpr int kDim = 3;
  using State = Eigen::Vector3d;
  Eigen::Matrix3d A = Eigen::Matrix3d::Identity();

  State step(const State& s) const { return A * s; }
  Eigen::Matrix3d jacobian(const State&) const { return A; }
  bool escaped(const State&) const { return false; }
};

}  // namespace rankone
