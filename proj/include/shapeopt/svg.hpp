#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "shapeopt/geo.hpp"

namespace shapeopt {

// Minimal deterministic SVG plotter in world coordinates. Primitives share one
// world->pixel transform; output is stable across reruns (fixed formatting).
class SvgPlot {
 public:
  SvgPlot(double xmin, double xmax, double ymin, double ymax, int width = 860,
          int height = 640);

  void filled_polygon(const std::vector<Vec2>& pts, const std::string& fill, double opacity);
  void polyline(const std::vector<Vec2>& pts, const std::string& color, double stroke_width,
                bool closed = false);
  void markers(const std::vector<Vec2>& pts, double radius_px, const std::string& color);
  void axes(const std::string& x_label, const std::string& y_label);

  void write(std::ostream& os) const;
  std::string str() const;

  Vec2 to_pixel(const Vec2& world) const;

 private:
  double xmin_, xmax_, ymin_, ymax_;
  int width_, height_;
  int margin_ = 48;
  std::vector<std::string> elems_;
};

}  // namespace shapeopt
