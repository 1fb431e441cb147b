#include "shapeopt/svg.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace shapeopt {

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace

SvgPlot::SvgPlot(double xmin, double xmax, double ymin, double ymax, int width, int height)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), width_(width), height_(height) {}

Vec2 SvgPlot::to_pixel(const Vec2& w) const {
  const double sx = (width_ - 2.0 * margin_) / (xmax_ - xmin_);
  const double sy = (height_ - 2.0 * margin_) / (ymax_ - ymin_);
  return {margin_ + (w.x - xmin_) * sx, height_ - margin_ - (w.y - ymin_) * sy};
}

void SvgPlot::filled_polygon(const std::vector<Vec2>& pts, const std::string& fill,
                             double opacity) {
  std::ostringstream os;
  os << "<polygon points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec2 p = to_pixel(pts[i]);
    os << (i ? " " : "") << fmt(p.x) << "," << fmt(p.y);
  }
  os << "\" fill=\"" << fill << "\" fill-opacity=\"" << fmt(opacity) << "\" stroke=\"none\"/>";
  elems_.push_back(os.str());
}

void SvgPlot::polyline(const std::vector<Vec2>& pts, const std::string& color,
                       double stroke_width, bool closed) {
  std::ostringstream os;
  os << (closed ? "<polygon" : "<polyline") << " points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec2 p = to_pixel(pts[i]);
    os << (i ? " " : "") << fmt(p.x) << "," << fmt(p.y);
  }
  os << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << fmt(stroke_width)
     << "\"/>";
  elems_.push_back(os.str());
}

void SvgPlot::markers(const std::vector<Vec2>& pts, double radius_px, const std::string& color) {
  for (const Vec2& w : pts) {
    const Vec2 p = to_pixel(w);
    std::ostringstream os;
    os << "<circle cx=\"" << fmt(p.x) << "\" cy=\"" << fmt(p.y) << "\" r=\"" << fmt(radius_px)
       << "\" fill=\"" << color << "\"/>";
    elems_.push_back(os.str());
  }
}

void SvgPlot::axes(const std::string& x_label, const std::string& y_label) {
  const Vec2 o = to_pixel({xmin_, ymin_});
  const Vec2 xe = to_pixel({xmax_, ymin_});
  const Vec2 ye = to_pixel({xmin_, ymax_});
  std::ostringstream os;
  os << "<line x1=\"" << fmt(o.x) << "\" y1=\"" << fmt(o.y) << "\" x2=\"" << fmt(xe.x)
     << "\" y2=\"" << fmt(xe.y) << "\" stroke=\"black\" stroke-width=\"1\"/>"
     << "<line x1=\"" << fmt(o.x) << "\" y1=\"" << fmt(o.y) << "\" x2=\"" << fmt(ye.x)
     << "\" y2=\"" << fmt(ye.y) << "\" stroke=\"black\" stroke-width=\"1\"/>"
     << "<text x=\"" << fmt(xe.x - 6) << "\" y=\"" << fmt(o.y + 28)
     << "\" font-size=\"13\" text-anchor=\"end\">" << x_label << "</text>"
     << "<text x=\"" << fmt(o.x - 30) << "\" y=\"" << fmt(ye.y - 10) << "\" font-size=\"13\">"
     << y_label << "</text>";
  // tick labels at the corners of the data range
  os << "<text x=\"" << fmt(o.x) << "\" y=\"" << fmt(o.y + 16)
     << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xmin_) << "</text>"
     << "<text x=\"" << fmt(xe.x) << "\" y=\"" << fmt(o.y + 16)
     << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xmax_) << "</text>"
     << "<text x=\"" << fmt(o.x - 6) << "\" y=\"" << fmt(o.y)
     << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(ymin_) << "</text>"
     << "<text x=\"" << fmt(o.x - 6) << "\" y=\"" << fmt(ye.y + 4)
     << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(ymax_) << "</text>";
  elems_.push_back(os.str());
}

void SvgPlot::write(std::ostream& os) const {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
     << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
     << "<rect width=\"" << width_ << "\" height=\"" << height_ << "\" fill=\"white\"/>\n";
  for (const auto& e : elems_) os << e << "\n";
  os << "</svg>\n";
}

std::string SvgPlot::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace shapeopt
