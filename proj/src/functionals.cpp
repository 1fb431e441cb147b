#include "shapeopt/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shapeopt/errors.hpp"

namespace shapeopt {

double support_area(const FourierBody& body) {
  double A = kPi * body.a[0] * body.a[0];
  for (int k = 1; k <= body.N; ++k) {
    const double w = 1.0 - double(k) * k;
    A += 0.5 * kPi * w * (body.a[k] * body.a[k] + body.b[k - 1] * body.b[k - 1]);
  }
  return A;
}

namespace {

// Golden-section extremum polish of f on [lo, hi]; returns the extremal value.
template <typename F>
double golden_extremum(F&& f, double lo, double hi, bool maximize) {
  constexpr double phi = 0.6180339887498949;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    const bool move_right = maximize ? (f1 < f2) : (f1 > f2);
    if (move_right) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return maximize ? std::max(f1, f2) : std::min(f1, f2);
}

template <typename F>
double golden_argext(F&& f, double lo, double hi, bool maximize) {
  constexpr double phi = 0.6180339887498949;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    const bool move_right = maximize ? (f1 < f2) : (f1 > f2);
    if (move_right) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

// Grid scan + local polish of s(t) = h(t) + h(t+pi).
double support_extent_extremum(const FourierBody& body, int M, bool maximize, double* arg) {
  const auto s = [&](double t) { return body.eval(t) + body.eval(t + kPi); };
  int best = 0;
  double bestv = s(0.0);
  for (int m = 1; m < M; ++m) {
    const double v = s(kTwoPi * m / M);
    if (maximize ? (v > bestv) : (v < bestv)) {
      bestv = v;
      best = m;
    }
  }
  const double step = kTwoPi / M;
  const double lo = kTwoPi * best / M - step;
  const double hi = kTwoPi * best / M + step;
  const double polished = golden_extremum(s, lo, hi, maximize);
  if (arg) *arg = golden_argext(s, lo, hi, maximize);
  return maximize ? std::max(bestv, polished) : std::min(bestv, polished);
}

}  // namespace

double support_diameter(const FourierBody& body, int Mgrid) {
  return support_extent_extremum(body, Mgrid, true, nullptr);
}

double support_width(const FourierBody& body, int Mgrid) {
  return support_extent_extremum(body, Mgrid, false, nullptr);
}

double support_diameter_direction(const FourierBody& body, int Mgrid) {
  double arg = 0.0;
  support_extent_extremum(body, Mgrid, true, &arg);
  return std::remainder(arg, kTwoPi);
}

GeoSummary support_functionals(const FourierBody& body, int Mgrid) {
  if (body.kind != FourierKind::Support)
    throw Error("support_functionals: support body expected");
  GeoSummary g;
  g.P = kTwoPi * body.a[0];
  g.A = support_area(body);
  if (!(g.A > 0.0)) throw NegativeArea("support_functionals: coefficient area <= 0");
  g.d = support_diameter(body, Mgrid);
  g.w = support_width(body, Mgrid);
  return g;
}

GeoSummary gauge_functionals(const FourierBody& body, int M) {
  if (body.kind != FourierKind::Gauge) throw Error("gauge_functionals: gauge body expected");
  double P = 0.0, A = 0.0;
  for (int k = 0; k < M; ++k) {
    const double th = kTwoPi * k / M;
    const double g = body.eval(th);
    if (!(g > 0.0)) throw NonPositiveGauge("gauge_functionals: g <= 0 on the grid");
    const double gp = body.deriv(th);
    P += std::sqrt(g * g + gp * gp) / (g * g);
    A += 1.0 / (g * g);
  }
  GeoSummary s;
  s.P = P * kTwoPi / M;
  s.A = 0.5 * A * kTwoPi / M;
  return s;
}

double brute_force_diameter(const PolygonBody& poly) {
  const auto& v = poly.vertices;
  const int n = int(v.size());
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double dx = v[i].x - v[j].x, dy = v[i].y - v[j].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  return std::sqrt(best);
}

GeoSummary polygon_functionals(const PolygonBody& poly) {
  const int n = poly.count();
  if (n < 3) throw DegeneratePolygon("polygon_functionals: fewer than 3 vertices");
  GeoSummary g;
  double P = 0.0;
  for (int i = 0; i < n; ++i) P += dist(poly.vertices[i], poly.vertices[(i + 1) % n]);
  g.P = P;
  g.A = std::abs(polygon_signed_area(poly.vertices));
  if (!(g.A > 0.0)) throw DegeneratePolygon("polygon_functionals: zero area");
  g.d = brute_force_diameter(poly);
  return g;
}

GeoSummary radial_functionals(const RadialBody& body) {
  const int M = body.count();
  if (M < 3) throw Error("radial_functionals: M >= 3 expected");
  const double c = std::cos(kTwoPi / M);
  double A = 0.0, P = 0.0;
  for (int k = 0; k < M; ++k) {
    const double r0 = body.rho[k], r1 = body.rho[(k + 1) % M];
    A += r0 * r1;
    P += std::sqrt(r0 * r0 + r1 * r1 - 2.0 * r0 * r1 * c);
  }
  GeoSummary g;
  g.A = 0.5 * std::sin(kTwoPi / M) * A;
  g.P = P;
  g.d = brute_force_diameter(polygon_from_radial(body));
  return g;
}

double shamos_diameter(const PolygonBody& poly) {
  if (!poly.is_convex()) throw NonConvexInput("shamos_diameter: convex CCW polygon expected");
  const auto& v = poly.vertices;
  const int n = int(v.size());
  if (n <= 3) return brute_force_diameter(poly);
  const auto sq = [&](int i, int j) {
    const double dx = v[i].x - v[j].x, dy = v[i].y - v[j].y;
    return dx * dx + dy * dy;
  };
  double best = 0.0;
  int j = 1;
  for (int i = 0; i < n; ++i) {
    const Vec2 e = v[(i + 1) % n] - v[i];
    // advance the antipodal pointer while the far chain still rotates with e;
    // collinear forward edges are skipped too
    int guard = 0;
    while (guard++ < 2 * n) {
      const Vec2 f = v[(j + 1) % n] - v[j];
      const double cr = cross(e, f);
      if (cr > 0.0 || (cr == 0.0 && dot(e, f) > 0.0))
        j = (j + 1) % n;
      else
        break;
    }
    best = std::max(best, sq(i, j));
    best = std::max(best, sq((i + 1) % n, j));
  }
  return std::sqrt(best);
}

}  // namespace shapeopt
