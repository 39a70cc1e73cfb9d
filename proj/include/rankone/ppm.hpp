#pragma once

#include <string>
#include <vector>

#include "rankone/model.hpp"

namespace rankone {

struct Bounds {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;
};

/// Binary P6 image: white background, one black pixel per point. X maps
/// linearly onto columns, Y onto rows with row 0 at the top (Y = ymax).
/// Points outside the bounds are dropped. Throws EmptyBounds for zero-area
/// bounds when there are points to place, InputError for empty dimensions.
std::string render_ppm(const std::vector<Vec2>& points, const Bounds& bounds, int width, int height);

/// Bounding box of the points, padded by `margin` times its extent.
Bounds bounds_of(const std::vector<Vec2>& points, double margin = 0.02);

/// Number of black pixels in an image produced by render_ppm.
long count_dark_pixels(const std::string& ppm);

}  // namespace rankone
