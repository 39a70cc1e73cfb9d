#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rankone/circle.hpp"
#include "rankone/lyapunov.hpp"
#include "rankone/model.hpp"
#include "rankone/orbit.hpp"
#include "rankone/planar.hpp"
#include "rankone/singular_limit.hpp"

namespace rankone {

/// Shortest text that round-trips the double; "nan", "inf", "-inf" otherwise.
std::string fmt_num(double v);

/// n,x,y,t[,X,Y] with one row per recorded state.
std::string orbit_csv(const OrbitRun& run);
std::vector<Vec2> projected_points(const OrbitRun& run);

std::string tongue_csv(const TongueGrid& grid);
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

nlohmann::ordered_json hypothesis_json(const ModelParams& p, const HypothesisReport& rep);
nlohmann::ordered_json lyapunov_json(const LyapunovEstimate& est);
nlohmann::ordered_json rotation_json(const CircleMap& map, const RotationEstimate& est);
nlohmann::ordered_json misiurewicz_json(const LimitFamily& fam, const MisiurewiczReport& rep);
nlohmann::ordered_json fixed_point_json(const PlanarFixedPoint& fp);

/// curve,index,x,y,X,Y,angle: manifold vertices (curve = unstable|stable),
/// then crossings (curve = crossing, angle filled in).
std::string manifolds_csv(const PlanarMap& map, const ManifoldSegment& wu, const ManifoldSegment& ws,
                          const std::vector<Crossing>& crossings);

/// JSON numbers cannot hold NaN or infinity; those become strings.
nlohmann::ordered_json json_number(double v);

}  // namespace rankone
