#include "rankone/ppm.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rankone/errors.hpp"

namespace rankone {

std::string render_ppm(const std::vector<Vec2>& points, const Bounds& b, int width, int height) {
  if (width < 1 || height < 1) throw InputError("image dimensions must be at least 1x1");
  const double dx = b.xmax - b.xmin;
  const double dy = b.ymax - b.ymin;
  if (!points.empty() && !(dx > 0 && dy > 0))
    throw EmptyBounds(fmt::format("bounds [{}, {}] x [{}, {}] have zero area", b.xmin, b.xmax, b.ymin, b.ymax));

  const std::string header = fmt::format("P6\n{} {}\n255\n", width, height);
  std::string img = header;
  img.append(static_cast<std::size_t>(width) * height * 3, static_cast<char>(255));
  char* pixels = img.data() + header.size();
  for (const Vec2& p : points) {
    if (!(p.x() >= b.xmin && p.x() <= b.xmax && p.y() >= b.ymin && p.y() <= b.ymax)) continue;
    const int col = std::min(width - 1, static_cast<int>(std::floor((p.x() - b.xmin) / dx * width)));
    const int row = std::min(height - 1, static_cast<int>(std::floor((b.ymax - p.y()) / dy * height)));
    char* px = pixels + (static_cast<std::size_t>(row) * width + col) * 3;
    px[0] = px[1] = px[2] = 0;
  }
  return img;
}

Bounds bounds_of(const std::vector<Vec2>& points, double margin) {
  if (points.empty()) return {};
  Bounds b{points[0].x(), points[0].x(), points[0].y(), points[0].y()};
  for (const Vec2& p : points) {
    b.xmin = std::min(b.xmin, p.x());
    b.xmax = std::max(b.xmax, p.x());
    b.ymin = std::min(b.ymin, p.y());
    b.ymax = std::max(b.ymax, p.y());
  }
  const double mx = std::max(b.xmax - b.xmin, 1e-12) * margin;
  const double my = std::max(b.ymax - b.ymin, 1e-12) * margin;
  return {b.xmin - mx, b.xmax + mx, b.ymin - my, b.ymax + my};
}

long count_dark_pixels(const std::string& ppm) {
  // Header is three newline-terminated lines.
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    pos = ppm.find('\n', pos);
    if (pos == std::string::npos) return 0;
    ++pos;
  }
  long dark = 0;
  for (std::size_t i = pos; i + 2 < ppm.size(); i += 3)
    if (ppm[i] == 0 && ppm[i + 1] == 0 && ppm[i + 2] == 0) ++dark;
  return dark;
}

}  // namespace rankone
