#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rankone/lyapunov.hpp"
#include "rankone/model.hpp"

namespace rankone {

/// A differentiable map of the plane. When periodic_x is set the first
/// coordinate is an angle: images are reported in [0, 2π) and geometry is
/// done in the projected plane (X, Y) = (y cos x, y sin x).
struct PlanarMap {
  std::function<Vec2(const Vec2&)> eval;
  std::function<Mat2(const Vec2&)> jacobian;
  bool periodic_x = false;
  /// Points outside are treated as escaped. Empty means the whole plane.
  std::function<bool(const Vec2&)> in_domain;

  Vec2 operator()(const Vec2& z) const { return eval(z); }
  bool contains(const Vec2& z) const { return !in_domain || in_domain(z); }

  /// k-fold composition (k >= 1), Jacobian by the chain rule.
  PlanarMap power(int k) const;

  static PlanarMap affine(const Mat2& A, const Vec2& c);
};

/// The (x, y) part of F with t frozen.
PlanarMap restricted(const ModelParams& p, const ModelFunctions& f, double t_frozen);

/// G_q ∘ ... ∘ G_1 where G_i is the map restricted at t_orbit[i-1]. The
/// t-values must form a periodic orbit of F3: each t_(i+1) is the image of
/// t_i and L^q(t_1) - t_1 - 2πp vanishes for some integer p, both to 1e-8.
/// Throws NotPeriodic otherwise.
PlanarMap compose_restricted(const ModelParams& p, const ModelFunctions& f,
                             const std::vector<double>& t_orbit);

/// Adapter for the Lyapunov engine.
struct PlanarSystem {
  static constexpr int kDim = 2;
  using State = Vec2;
  const PlanarMap* map = nullptr;

  State step(const State& z) const { return map->eval(z); }
  Mat2 jacobian(const State& z) const { return map->jacobian(z); }
  bool escaped(const State& z) const { return !map->contains(z); }
};

LyapunovEstimate lyapunov_spectrum(const PlanarMap& map, const Vec2& z0, const LyapunovConfig& cfg);

/// Band check for restricted maps: y in [1 - slack, 1 + b + slack].
std::function<bool(const Vec2&)> band_domain(double b, double slack = 0.5);

enum class FixedPointKind { saddle, sink, source, non_hyperbolic };
std::string to_string(FixedPointKind k);

struct PlanarFixedPoint {
  Vec2 point = Vec2::Zero();
  int period = 1;
  /// Eigenvalues of D(T^k), ordered by decreasing modulus.
  std::complex<double> mu1, mu2;
  FixedPointKind kind = FixedPointKind::non_hyperbolic;
  /// Unit eigenvectors for real multipliers (saddles): mu1 ↔ unstable, mu2 ↔ stable.
  Vec2 unstable_dir = Vec2::Zero();
  Vec2 stable_dir = Vec2::Zero();
  double residual = 0.0;  // |T^k(z) - z| at the converged point
  double det = 0.0;       // det D(T^k)

  bool is_saddle() const { return kind == FixedPointKind::saddle; }
};
using PlanarSaddle = PlanarFixedPoint;

struct FixedPointSearch {
  std::vector<PlanarFixedPoint> points;
  int seeds_tried = 0;
  int no_convergence = 0;  // seeds whose Newton run failed
};

/// Newton on T^k(z) - z from each seed. Converged roots (residual <= 1e-10)
/// are deduplicated at distance 1e-6 and classified by their multipliers.
/// Points whose minimal period is a proper divisor of k are dropped.
FixedPointSearch find_planar_fixed_points(const PlanarMap& map, int k,
                                          const std::vector<Vec2>& seeds);

/// nx × ny seeds on [x_lo, x_hi) × (y_lo, y_hi), cell centres.
std::vector<Vec2> seed_grid(double x_lo, double x_hi, double y_lo, double y_hi, int nx, int ny);

enum class ManifoldSide { unstable, stable };

struct ManifoldConfig {
  double arc_target = 10.0;
  int max_iter = 200;
  double seed_length = 1e-4;  // length of the fundamental segment
  double max_chord = 1e-3;
  int branch = 1;  // +1 or -1: which half of the eigendirection to follow
  double newton_tol = 1e-12;
  std::size_t max_points = 4'000'000;
};

enum class ManifoldStatus { reached_target, max_iter, escaped, max_points, degenerate, inverse_failed };
std::string to_string(ManifoldStatus s);

struct ManifoldSegment {
  ManifoldSide side = ManifoldSide::unstable;
  std::vector<Vec2> points;  // starts at the saddle; x unwrapped along the curve
  double arclength = 0.0;
  int iterations = 0;        // fundamental-segment images computed
  ManifoldStatus status = ManifoldStatus::max_iter;
  std::size_t last_piece_begin = 0;  // index of the first vertex of the newest piece
  /// Some piece was cut short where its points could not be mapped.
  bool truncated = false;
  /// One more forward image of the last piece (unstable side), for checks.
  std::vector<Vec2> extension;
  bool extension_complete = false;
};

/// Grows one branch of W^u or W^s of a saddle of period k (the map is applied
/// k times per step, 2k when the multiplier is negative). The stable side
/// inverts the map pointwise by Newton; failure on the first piece throws
/// InverseFailed. Later, a piece whose points cannot all be mapped (escape,
/// or the curve crossing the edge of the map's image) is cut at the last
/// good vertex and growth continues from the remainder.
ManifoldSegment manifold_segment(const PlanarMap& map, const PlanarFixedPoint& saddle,
                                 ManifoldSide side, const ManifoldConfig& cfg);

/// Largest distance from the image of a vertex to the curve: the polyline
/// plus its extension for the unstable side, the polyline itself for the
/// stable side. Measured in the projected plane for periodic_x maps.
double invariance_error(const PlanarMap& map, const PlanarFixedPoint& saddle,
                        const ManifoldSegment& seg);

/// Plane coordinates used for geometry: (y cos x, y sin x) when periodic_x.
Vec2 plane_point(const PlanarMap& map, const Vec2& z);
std::vector<Vec2> plane_polyline(const PlanarMap& map, const std::vector<Vec2>& poly);

struct Crossing {
  Vec2 point = Vec2::Zero();
  double angle = 0.0;  // in [0, π/2]
  bool transverse = false;
  std::size_t seg_u = 0;
  std::size_t seg_s = 0;
};

/// All intersections between the segments of two polylines (orientation
/// tests, grid-bucketed). Crossings closer than 1e-12 are reported once.
std::vector<Crossing> homoclinic_crossings(const std::vector<Vec2>& wu,
                                           const std::vector<Vec2>& ws,
                                           double transverse_angle = 1e-3);

/// Distance from q to the polyline.
double distance_to_polyline(const Vec2& q, const std::vector<Vec2>& poly);

struct HomoclinicCandidate {
  PlanarFixedPoint saddle;
  ManifoldSegment unstable, stable;
  double unstable_invariance = 0.0, stable_invariance = 0.0;
  std::vector<Crossing> crossings;  // away from the saddle itself
  int transverse = 0;
  bool complete = false;  // both arcs reach the target, invariance within tolerance, a transverse crossing
};

struct HomoclinicSearch {
  int saddles_found = 0;
  int pairs_tried = 0;
  std::optional<HomoclinicCandidate> best;  // the first complete pair, else the one with most evidence
  std::string last_error;
};

/// Searches saddles of period 1..period_max (seeds on a 16 × 8 grid over the
/// band y in [1, 1 + b]) and, for each, both branches of W^u and W^s, stopping
/// at the first pair that is complete with invariance at most `invariance_tol`.
HomoclinicSearch search_homoclinic(const PlanarMap& map, double b, int period_max, const ManifoldConfig& cfg,
                                   double invariance_tol = 1e-6);

}  // namespace rankone
