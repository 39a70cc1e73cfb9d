#include "rankone/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "rankone/circle.hpp"
#include "rankone/errors.hpp"

namespace rankone {

namespace {

double wrap_signed(double d) {
  d = std::fmod(d, kTwoPi);
  if (d > std::numbers::pi) d -= kTwoPi;
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

// T(z) - z with the angular component taken on the circle.
Vec2 difference(const PlanarMap& map, const Vec2& a, const Vec2& b) {
  Vec2 d = a - b;
  if (map.periodic_x) d.x() = wrap_signed(d.x());
  return d;
}

// Shifts z.x by a multiple of 2π to land closest to ref.x.
Vec2 unwrap_near(const PlanarMap& map, Vec2 z, const Vec2& ref) {
  if (map.periodic_x) z.x() += kTwoPi * std::round((ref.x() - z.x()) / kTwoPi);
  return z;
}

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

double point_segment_distance(const Vec2& q, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0 ? (q - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - q).norm();
}

// Uniform bucket grid over polyline segments.
class SegmentIndex {
 public:
  SegmentIndex(const std::vector<Vec2>& poly, double cell) : poly_(poly), cell_(cell) {
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
      const auto [ix0, iy0] = key(poly[i].cwiseMin(poly[i + 1]));
      const auto [ix1, iy1] = key(poly[i].cwiseMax(poly[i + 1]));
      if ((ix1 - ix0 + 1) * (iy1 - iy0 + 1) > 4096) {
        long_segments_.push_back(i);
        continue;
      }
      for (long ix = ix0; ix <= ix1; ++ix)
        for (long iy = iy0; iy <= iy1; ++iy) buckets_[pack(ix, iy)].push_back(i);
    }
  }

  /// Segment indices whose buckets meet the box [lo, hi]; may repeat.
  template <class Fn>
  void visit(const Vec2& lo, const Vec2& hi, Fn&& fn) const {
    const auto [ix0, iy0] = key(lo);
    const auto [ix1, iy1] = key(hi);
    if ((ix1 - ix0 + 1) * (iy1 - iy0 + 1) > 4096) {
      for (std::size_t i = 0; i + 1 < poly_.size(); ++i) fn(i);
      return;
    }
    for (long ix = ix0; ix <= ix1; ++ix)
      for (long iy = iy0; iy <= iy1; ++iy) {
        const auto it = buckets_.find(pack(ix, iy));
        if (it == buckets_.end()) continue;
        for (std::size_t i : it->second) fn(i);
      }
    for (std::size_t i : long_segments_) fn(i);
  }

  double distance(const Vec2& q) const {
    double best = std::numeric_limits<double>::infinity();
    const Vec2 r(cell_, cell_);
    visit(q - r, q + r, [&](std::size_t i) {
      best = std::min(best, point_segment_distance(q, poly_[i], poly_[i + 1]));
    });
    if (best <= cell_) return best;
    for (std::size_t i = 0; i + 1 < poly_.size(); ++i)
      best = std::min(best, point_segment_distance(q, poly_[i], poly_[i + 1]));
    if (poly_.size() == 1) best = (q - poly_[0]).norm();
    return best;
  }

 private:
  std::pair<long, long> key(const Vec2& z) const {
    return {static_cast<long>(std::floor(z.x() / cell_)), static_cast<long>(std::floor(z.y() / cell_))};
  }
  static long long pack(long ix, long iy) {
    return (static_cast<long long>(ix) << 32) ^ static_cast<long long>(static_cast<std::uint32_t>(iy));
  }

  const std::vector<Vec2>& poly_;
  double cell_;
  std::unordered_map<long long, std::vector<std::size_t>> buckets_;
  std::vector<std::size_t> long_segments_;
};

double typical_cell(const std::vector<Vec2>& poly) {
  if (poly.size() < 2) return 1.0;
  Vec2 lo = poly[0], hi = poly[0];
  double total = 0.0;
  for (std::size_t i = 1; i < poly.size(); ++i) {
    lo = lo.cwiseMin(poly[i]);
    hi = hi.cwiseMax(poly[i]);
    total += (poly[i] - poly[i - 1]).norm();
  }
  const double extent = std::max((hi - lo).maxCoeff(), 1e-12);
  const double mean = total / static_cast<double>(poly.size() - 1);
  return std::max({mean, extent / 2048.0, 1e-12});
}

struct Effective {
  PlanarMap map;
  double multiplier;  // real eigenvalue of the effective map along the branch
};

Effective effective_map(const PlanarMap& map, const PlanarFixedPoint& fp, ManifoldSide side) {
  const double mu = side == ManifoldSide::unstable ? fp.mu1.real() : fp.mu2.real();
  if (mu < 0) return {map.power(2 * fp.period), mu * mu};
  return {map.power(fp.period), mu};
}

}  // namespace

PlanarMap PlanarMap::power(int k) const {
  if (k < 1) throw InputError("map power must be at least 1");
  if (k == 1) return *this;
  PlanarMap base = *this;
  PlanarMap out;
  out.periodic_x = periodic_x;
  out.in_domain = in_domain;
  out.eval = [base, k](const Vec2& z) {
    Vec2 w = z;
    for (int i = 0; i < k; ++i) w = base.eval(w);
    return w;
  };
  out.jacobian = [base, k](const Vec2& z) {
    Vec2 w = z;
    Mat2 J = Mat2::Identity();
    for (int i = 0; i < k; ++i) {
      J = base.jacobian(w) * J;
      w = base.eval(w);
    }
    return J;
  };
  return out;
}

PlanarMap PlanarMap::affine(const Mat2& A, const Vec2& c) {
  PlanarMap m;
  m.eval = [A, c](const Vec2& z) -> Vec2 { return A * z + c; };
  m.jacobian = [A](const Vec2&) -> Mat2 { return A; };
  return m;
}

std::function<bool(const Vec2&)> band_domain(double b, double slack) {
  return [b, slack](const Vec2& z) { return z.y() >= 1.0 - slack && z.y() <= 1.0 + b + slack; };
}

PlanarMap restricted(const ModelParams& p, const ModelFunctions& f, double t_frozen) {
  PlanarMap m;
  m.periodic_x = true;
  m.eval = [p, f, t_frozen](const Vec2& z) { return eval_planar(p, f, z.x(), z.y(), t_frozen); };
  m.jacobian = [p, f, t_frozen](const Vec2& z) {
    return eval_planar_jacobian(p, f, z.x(), z.y(), t_frozen);
  };
  m.in_domain = band_domain(p.b);
  return m;
}

PlanarMap compose_restricted(const ModelParams& p, const ModelFunctions& f,
                             const std::vector<double>& t_orbit) {
  if (t_orbit.empty()) throw NotPeriodic("empty t-orbit");
  const CircleMap circle(p.alpha2, p.delta2, f.psi3);
  const std::size_t q = t_orbit.size();
  for (std::size_t i = 0; i + 1 < q; ++i) {
    const double gap = circle_distance(circle.apply(t_orbit[i]), t_orbit[i + 1]);
    if (gap > 1e-8)
      throw NotPeriodic("t_orbit[" + std::to_string(i + 1) + "] is not the image of its predecessor");
  }
  double lifted = t_orbit[0];
  for (std::size_t i = 0; i < q; ++i) lifted = circle.lift(lifted);
  const double turns = std::round((lifted - t_orbit[0]) / kTwoPi);
  const double residual = std::abs(lifted - t_orbit[0] - kTwoPi * turns);
  if (residual > 1e-8)
    throw NotPeriodic("t_orbit does not close: residual " + std::to_string(residual));

  PlanarMap m;
  m.periodic_x = true;
  m.in_domain = band_domain(p.b);
  m.eval = [p, f, t_orbit](const Vec2& z) {
    Vec2 w = z;
    for (double t : t_orbit) w = eval_planar(p, f, w.x(), w.y(), t);
    return w;
  };
  m.jacobian = [p, f, t_orbit](const Vec2& z) {
    Vec2 w = z;
    Mat2 J = Mat2::Identity();
    for (double t : t_orbit) {
      J = eval_planar_jacobian(p, f, w.x(), w.y(), t) * J;
      w = eval_planar(p, f, w.x(), w.y(), t);
    }
    return J;
  };
  return m;
}

LyapunovEstimate lyapunov_spectrum(const PlanarMap& map, const Vec2& z0, const LyapunovConfig& cfg) {
  return lyapunov_spectrum(PlanarSystem{&map}, z0, cfg);
}

std::string to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::saddle: return "saddle";
    case FixedPointKind::sink: return "sink";
    case FixedPointKind::source: return "source";
    case FixedPointKind::non_hyperbolic: return "non_hyperbolic";
  }
  return "unknown";
}

std::string to_string(ManifoldStatus s) {
  switch (s) {
    case ManifoldStatus::reached_target: return "reached_target";
    case ManifoldStatus::max_iter: return "max_iter";
    case ManifoldStatus::escaped: return "escaped";
    case ManifoldStatus::max_points: return "max_points";
    case ManifoldStatus::degenerate: return "degenerate";
    case ManifoldStatus::inverse_failed: return "inverse_failed";
  }
  return "unknown";
}

std::vector<Vec2> seed_grid(double x_lo, double x_hi, double y_lo, double y_hi, int nx, int ny) {
  std::vector<Vec2> seeds;
  seeds.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      seeds.emplace_back(x_lo + (x_hi - x_lo) * (i + 0.5) / nx, y_lo + (y_hi - y_lo) * (j + 0.5) / ny);
  return seeds;
}

namespace {

PlanarFixedPoint classify(const PlanarMap& Tk, const Vec2& z, int k) {
  PlanarFixedPoint fp;
  fp.point = z;
  fp.period = k;
  const Mat2 M = Tk.jacobian(z);
  fp.det = M.determinant();
  const double tr = M.trace();
  const double disc = tr * tr - 4.0 * fp.det;
  const std::complex<double> root = std::sqrt(std::complex<double>(disc, 0.0));
  std::complex<double> a = (tr + root) / 2.0, b = (tr - root) / 2.0;
  if (std::abs(b) > std::abs(a)) std::swap(a, b);
  fp.mu1 = a;
  fp.mu2 = b;
  const double m1 = std::abs(a), m2 = std::abs(b);
  constexpr double margin = 1e-9;
  if (m1 > 1 + margin && m2 < 1 - margin)
    fp.kind = FixedPointKind::saddle;
  else if (m1 < 1 - margin)
    fp.kind = FixedPointKind::sink;
  else if (m2 > 1 + margin)
    fp.kind = FixedPointKind::source;
  else
    fp.kind = FixedPointKind::non_hyperbolic;

  if (disc >= 0) {
    auto eigvec = [&](double mu) {
      const Vec2 v1(M(0, 1), mu - M(0, 0));
      const Vec2 v2(mu - M(1, 1), M(1, 0));
      Vec2 v = v1.norm() >= v2.norm() ? v1 : v2;
      if (v.norm() == 0) v = Vec2(1, 0);  // M = μI
      return Vec2(v.normalized());
    };
    fp.unstable_dir = eigvec(a.real());
    fp.stable_dir = eigvec(b.real());
    if (fp.unstable_dir.isApprox(fp.stable_dir) || fp.unstable_dir.isApprox(-fp.stable_dir)) {
      // Scalar matrix: any basis is an eigenbasis.
      fp.unstable_dir = Vec2(1, 0);
      fp.stable_dir = Vec2(0, 1);
    }
  }
  return fp;
}

std::optional<Vec2> newton_fixed_point(const PlanarMap& Tk, Vec2 z) {
  for (int it = 0; it < 60; ++it) {
    Vec2 F;
    Mat2 J;
    try {
      F = difference(Tk, Tk.eval(z), z);
      J = Tk.jacobian(z) - Mat2::Identity();
    } catch (const NumericalError&) {
      return std::nullopt;
    }
    if (!F.allFinite() || !J.allFinite()) return std::nullopt;
    if (F.norm() <= 1e-14) break;
    Vec2 dz = J.fullPivLu().solve(-F);
    if (!dz.allFinite()) return std::nullopt;
    const double step = dz.norm();
    if (step > 0.25) dz *= 0.25 / step;
    z += dz;
    if (Tk.periodic_x) z.x() = wrap_angle(z.x());
    if (step < 1e-15) break;
  }
  return z;
}

}  // namespace

FixedPointSearch find_planar_fixed_points(const PlanarMap& map, int k, const std::vector<Vec2>& seeds) {
  if (k < 1) throw InputError("period must be at least 1");
  const PlanarMap Tk = map.power(k);
  FixedPointSearch out;
  for (const Vec2& seed : seeds) {
    ++out.seeds_tried;
    const auto z = newton_fixed_point(Tk, seed);
    if (!z || !map.contains(*z)) {
      ++out.no_convergence;
      continue;
    }
    double residual;
    try {
      residual = difference(Tk, Tk.eval(*z), *z).norm();
    } catch (const NumericalError&) {
      ++out.no_convergence;
      continue;
    }
    if (!(residual <= 1e-10)) {
      ++out.no_convergence;
      continue;
    }
    bool lower_period = false;
    for (int d = 1; d < k && !lower_period; ++d) {
      if (k % d != 0) continue;
      const PlanarMap Td = map.power(d);
      lower_period = difference(Td, Td.eval(*z), *z).norm() <= 1e-8;
    }
    if (lower_period) continue;
    const bool duplicate = std::any_of(out.points.begin(), out.points.end(), [&](const PlanarFixedPoint& q) {
      return difference(map, q.point, *z).norm() <= 1e-6;
    });
    if (duplicate) continue;
    PlanarFixedPoint fp = classify(Tk, *z, k);
    fp.residual = residual;
    out.points.push_back(fp);
  }
  return out;
}

Vec2 plane_point(const PlanarMap& map, const Vec2& z) {
  if (!map.periodic_x) return z;
  return {z.y() * std::cos(z.x()), z.y() * std::sin(z.x())};
}

std::vector<Vec2> plane_polyline(const PlanarMap& map, const std::vector<Vec2>& poly) {
  std::vector<Vec2> out;
  out.reserve(poly.size());
  for (const Vec2& z : poly) out.push_back(plane_point(map, z));
  return out;
}

namespace {

// Solves T(w) = z near the seed.
Vec2 newton_inverse(const PlanarMap& T, const Vec2& z, Vec2 w, double tol) {
  double res_norm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 80; ++it) {
    Vec2 R;
    try {
      R = difference(T, T.eval(w), z);
    } catch (const NumericalError&) {
      throw InverseFailed("inverse Newton left the domain of definition");
    }
    res_norm = R.norm();
    if (res_norm <= tol) return w;
    const Mat2 J = T.jacobian(w);
    Vec2 dw = J.fullPivLu().solve(-R);
    if (!dw.allFinite()) break;
    // Backtrack while the step leaves the domain or does not reduce |R|.
    double lam = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt, lam *= 0.5) {
      const Vec2 trial = w + lam * dw;
      try {
        const double r = difference(T, T.eval(trial), z).norm();
        if (std::isfinite(r) && r < res_norm) {
          w = trial;
          accepted = true;
          break;
        }
      } catch (const NumericalError&) {
      }
    }
    if (!accepted) break;
  }
  if (res_norm <= tol * 10) return w;  // stagnated at roundoff level
  throw InverseFailed("inverse Newton did not converge (residual " + std::to_string(res_norm) + ")");
}

double plane_dist(const PlanarMap& map, const Vec2& a, const Vec2& b) {
  return (plane_point(map, a) - plane_point(map, b)).norm();
}

class Grower {
 public:
  Grower(const PlanarMap& base, const PlanarMap& T, ManifoldSide side, const ManifoldConfig& cfg)
      : base_(base), T_(T), side_(side), cfg_(cfg) {}

  // Image (unstable) or preimage (stable) of a polyline piece, refined until
  // every chord is at most max_chord. The first vertex of the result is the
  // last vertex of the piece, which is the image of its first vertex. When a
  // vertex cannot be mapped (escape, or no preimage) the result stops at the
  // last good vertex and `truncated` is set.
  void advance(const std::vector<Vec2>& piece, std::vector<Vec2>& out, bool& truncated) {
    out.clear();
    truncated = false;
    out.push_back(piece.back());
    Vec2 prev_src = piece.front();
    Vec2 prev_img = piece.back();
    for (std::size_t i = 1; i < piece.size(); ++i) {
      Vec2 img;
      if (!locate(prev_src, prev_img, piece[i], img, 0) ||
          !refine(prev_src, piece[i], prev_img, img, out, 0)) {
        truncated = true;
        break;
      }
      out.push_back(img);
      prev_src = piece[i];
      prev_img = img;
      if (out.size() > cfg_.max_points) {
        truncated = true;
        break;
      }
    }
    thin(out);
  }

  // Image of b given that a (next to b on the curve) has image ia. Forward
  // images are unwrapped next to ia; preimages are found by Newton seeded
  // from the linearisation at ia, continuing through midpoints when the
  // direct solve fails.
  bool locate(const Vec2& a, const Vec2& ia, const Vec2& b, Vec2& ib, int depth) {
    try {
      if (side_ == ManifoldSide::unstable) {
        ib = unwrap_near(base_, T_.eval(b), ia);
        return ib.allFinite() && base_.contains(ib);
      }
      try {
        Vec2 seed = ia;
        const Vec2 step = T_.jacobian(ia).fullPivLu().solve(difference(base_, b, T_.eval(ia)));
        if (step.allFinite()) seed += step;
        ib = newton_inverse(T_, b, seed, cfg_.newton_tol);
        return ib.allFinite() && base_.contains(ib);
      } catch (const InverseFailed&) {
        if (depth >= 12) {
          inverse_failed_ = true;
          return false;
        }
        const Vec2 m = 0.5 * (a + b);
        Vec2 im;
        if (!locate(a, ia, m, im, depth + 1)) return false;
        return locate(m, im, b, ib, depth + 1);
      }
    } catch (const LogDomainError&) {
      return false;
    }
  }

  bool inverse_failed() const { return inverse_failed_; }

 private:
  bool refine(const Vec2& a, const Vec2& b, const Vec2& ia, const Vec2& ib, std::vector<Vec2>& out,
              int depth) {
    if (plane_dist(base_, ia, ib) <= cfg_.max_chord || depth > 50) return true;
    const Vec2 m = 0.5 * (a + b);
    Vec2 im;
    if (!locate(a, ia, m, im, 0)) return false;
    if (!refine(a, m, ia, im, out, depth + 1)) return false;
    out.push_back(im);
    return refine(m, b, im, ib, out, depth + 1);
  }

  // Drops vertices crowded below min_chord whose removal moves the curve by
  // at most 1e-10. Keeps pieces that collapse onto an attractor cheap.
  void thin(std::vector<Vec2>& pts) const {
    if (pts.size() < 3) return;
    const double min_chord = cfg_.max_chord * 1e-2;
    std::vector<Vec2> kept{pts.front()};
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const Vec2 a = plane_point(base_, kept.back());
      const Vec2 b = plane_point(base_, pts[i + 1]);
      const bool crowded = (b - a).norm() <= min_chord;
      if (crowded && point_segment_distance(plane_point(base_, pts[i]), a, b) <= 1e-10) continue;
      kept.push_back(pts[i]);
    }
    kept.push_back(pts.back());
    pts.swap(kept);
  }

  const PlanarMap& base_;
  const PlanarMap& T_;
  ManifoldSide side_;
  const ManifoldConfig& cfg_;
  bool inverse_failed_ = false;
};

double polyline_length(const PlanarMap& map, const std::vector<Vec2>& poly, std::size_t from = 0) {
  double s = 0.0;
  for (std::size_t i = std::max<std::size_t>(from, 1); i < poly.size(); ++i)
    s += plane_dist(map, poly[i - 1], poly[i]);
  return s;
}

}  // namespace

ManifoldSegment manifold_segment(const PlanarMap& map, const PlanarFixedPoint& saddle,
                                 ManifoldSide side, const ManifoldConfig& cfg) {
  ManifoldSegment seg;
  seg.side = side;
  if (!saddle.is_saddle() || std::abs(saddle.mu1.imag()) > 0) {
    seg.status = ManifoldStatus::degenerate;
    seg.points = {saddle.point};
    return seg;
  }
  const auto [T, mult] = effective_map(map, saddle, side);
  const double r = side == ManifoldSide::unstable ? std::abs(mult) : 1.0 / std::abs(mult);
  const Vec2 v = (cfg.branch < 0 ? -1.0 : 1.0) *
                 (side == ManifoldSide::unstable ? saddle.unstable_dir : saddle.stable_dir);
  const Vec2 p = saddle.point;

  Grower grower(map, T, side, cfg);
  const double s0 = cfg.seed_length / (r - 1.0);
  const Vec2 za = p + s0 * v;
  // The image (preimage) of the fundamental segment's start, continued from
  // the saddle itself.
  Vec2 zb;
  if (!grower.locate(p, p, za, zb, 0)) {
    if (grower.inverse_failed()) throw InverseFailed("no preimage along the stable direction");
    seg.status = ManifoldStatus::escaped;
    seg.points = {p};
    return seg;
  }
  zb = unwrap_near(map, zb, za);

  seg.points = {p, za, zb};
  seg.last_piece_begin = 1;
  seg.arclength = polyline_length(map, seg.points);
  seg.iterations = 1;

  std::vector<Vec2> piece = {za, zb};
  std::vector<Vec2> next;
  bool truncated = false;
  seg.status = ManifoldStatus::max_iter;
  while (true) {
    if (seg.arclength >= cfg.arc_target) {
      seg.status = ManifoldStatus::reached_target;
      break;
    }
    if (seg.iterations >= cfg.max_iter) break;
    grower.advance(piece, next, truncated);
    if (next.size() < 2) {
      if (grower.inverse_failed() && seg.iterations == 1)
        throw InverseFailed("stable-side inversion failed on the first piece");
      seg.status = seg.points.size() > cfg.max_points ? ManifoldStatus::max_points
                   : grower.inverse_failed()           ? ManifoldStatus::inverse_failed
                                                       : ManifoldStatus::escaped;
      break;
    }
    seg.truncated = seg.truncated || truncated;
    seg.last_piece_begin = seg.points.size() - 1;
    seg.points.insert(seg.points.end(), next.begin() + 1, next.end());
    seg.arclength += polyline_length(map, next);
    piece.swap(next);
    ++seg.iterations;
    if (seg.points.size() > cfg.max_points) {
      seg.status = ManifoldStatus::max_points;
      break;
    }
  }

  if (side == ManifoldSide::unstable) {
    std::vector<Vec2> ext;
    grower.advance(piece, ext, truncated);
    seg.extension.assign(ext.begin() + 1, ext.end());
    seg.extension_complete = !truncated;
  }
  return seg;
}

double invariance_error(const PlanarMap& map, const PlanarFixedPoint& saddle, const ManifoldSegment& seg) {
  if (seg.points.size() < 2) return 0.0;
  const PlanarMap T = effective_map(map, saddle, seg.side).map;
  std::vector<Vec2> curve = seg.points;
  if (seg.side == ManifoldSide::unstable)
    curve.insert(curve.end(), seg.extension.begin(), seg.extension.end());
  const std::vector<Vec2> plane = plane_polyline(map, curve);
  const SegmentIndex index(plane, std::max(typical_cell(plane), 1e-6));

  // Without an extension the images of the last piece are not on the curve.
  std::size_t n_check = seg.points.size();
  if (seg.side == ManifoldSide::unstable && !seg.extension_complete) n_check = seg.last_piece_begin + 1;

  double worst = 0.0;
  for (std::size_t i = 0; i < n_check; ++i) {
    Vec2 img;
    try {
      img = T.eval(seg.points[i]);
    } catch (const NumericalError&) {
      continue;
    }
    worst = std::max(worst, index.distance(plane_point(map, img)));
  }
  return worst;
}

std::vector<Crossing> homoclinic_crossings(const std::vector<Vec2>& wu, const std::vector<Vec2>& ws,
                                           double transverse_angle) {
  std::vector<Crossing> out;
  if (wu.size() < 2 || ws.size() < 2) return out;
  const SegmentIndex index(ws, std::max(typical_cell(ws), typical_cell(wu)));
  std::vector<std::size_t> stamp(ws.size(), std::numeric_limits<std::size_t>::max());

  for (std::size_t i = 0; i + 1 < wu.size(); ++i) {
    const Vec2& a = wu[i];
    const Vec2& b = wu[i + 1];
    index.visit(a.cwiseMin(b), a.cwiseMax(b), [&](std::size_t j) {
      if (stamp[j] == i) return;
      stamp[j] = i;
      const Vec2& c = ws[j];
      const Vec2& d = ws[j + 1];
      const double d1 = orient(c, d, a), d2 = orient(c, d, b);
      const double d3 = orient(a, b, c), d4 = orient(a, b, d);
      if ((d1 > 0 && d2 > 0) || (d1 < 0 && d2 < 0)) return;
      if ((d3 > 0 && d4 > 0) || (d3 < 0 && d4 < 0)) return;
      if (d1 == 0 && d2 == 0) return;  // collinear overlap: no crossing angle
      const Vec2 point = a + (d1 / (d1 - d2)) * (b - a);
      const Vec2 u = b - a, w = d - c;
      const double cross = u.x() * w.y() - u.y() * w.x();
      const double angle = std::atan2(std::abs(cross), std::abs(u.dot(w)));
      for (const Crossing& prev : out)
        if ((prev.point - point).norm() <= 1e-12) return;
      out.push_back({point, angle, angle >= transverse_angle, i, j});
    });
  }
  return out;
}

double distance_to_polyline(const Vec2& q, const std::vector<Vec2>& poly) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (poly.size() == 1) return (q - poly[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i)
    best = std::min(best, point_segment_distance(q, poly[i], poly[i + 1]));
  return best;
}

namespace {

double candidate_score(const HomoclinicCandidate& c) {
  return 4.0 * c.complete + 2.0 * (c.transverse > 0) + std::min(c.unstable.arclength, c.stable.arclength) * 1e-3;
}

}  // namespace

HomoclinicSearch search_homoclinic(const PlanarMap& map, double b, int period_max, const ManifoldConfig& cfg,
                                   double invariance_tol) {
  HomoclinicSearch out;
  const auto seeds = seed_grid(0.0, kTwoPi, 1.0, 1.0 + b, 16, 8);
  std::vector<PlanarFixedPoint> saddles;
  for (int k = 1; k <= period_max; ++k)
    for (const PlanarFixedPoint& fp : find_planar_fixed_points(map, k, seeds).points)
      if (fp.is_saddle()) saddles.push_back(fp);
  out.saddles_found = static_cast<int>(saddles.size());

  for (const PlanarFixedPoint& s : saddles) {
    std::vector<ManifoldSegment> wu, ws;
    for (int branch : {1, -1}) {
      ManifoldConfig mc = cfg;
      mc.branch = branch;
      try {
        wu.push_back(manifold_segment(map, s, ManifoldSide::unstable, mc));
        ws.push_back(manifold_segment(map, s, ManifoldSide::stable, mc));
      } catch (const NumericalError& e) {
        out.last_error = e.what();
      }
    }
    std::vector<double> inv_u, inv_s;
    for (const auto& seg : wu) inv_u.push_back(invariance_error(map, s, seg));
    for (const auto& seg : ws) inv_s.push_back(invariance_error(map, s, seg));
    const Vec2 ps = plane_point(map, s.point);
    for (std::size_t i = 0; i < wu.size(); ++i) {
      for (std::size_t j = 0; j < ws.size(); ++j) {
        ++out.pairs_tried;
        HomoclinicCandidate c;
        c.saddle = s;
        c.unstable = wu[i];
        c.stable = ws[j];
        c.unstable_invariance = inv_u[i];
        c.stable_invariance = inv_s[j];
        for (const Crossing& x : homoclinic_crossings(plane_polyline(map, wu[i].points), plane_polyline(map, ws[j].points)))
          if ((x.point - ps).norm() > 1e-6) c.crossings.push_back(x);
        c.transverse = static_cast<int>(
            std::count_if(c.crossings.begin(), c.crossings.end(), [](const Crossing& x) { return x.transverse; }));
        c.complete = c.unstable.arclength >= cfg.arc_target && c.stable.arclength >= cfg.arc_target &&
                     c.unstable_invariance <= invariance_tol && c.stable_invariance <= invariance_tol &&
                     c.transverse > 0;
        if (!out.best || candidate_score(c) > candidate_score(*out.best)) out.best = std::move(c);
        if (out.best->complete) return out;
      }
    }
  }
  return out;
}

}  // namespace rankone
