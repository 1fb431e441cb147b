#include "shapeopt/bodies.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "shapeopt/errors.hpp"
#include "shapeopt/functionals.hpp"

namespace shapeopt {

// ---- geo helpers -----------------------------------------------------------

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  if (pts.size() < 3) return pts;
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const int n = int(pts.size());
  if (n < 3) return pts;
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lo = k + 1; i >= 0; --i) {  // upper chain
    while (k >= lo && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_signed_area(const std::vector<Vec2>& v) {
  double s = 0.0;
  const int n = int(v.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * s;
}

Vec2 polygon_centroid(const std::vector<Vec2>& v) {
  const int n = int(v.size());
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    const double w = p.x * q.y - q.x * p.y;
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  a *= 0.5;
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

// ---- FourierBody ------------------------------------------------------------

FourierBody FourierBody::support(std::vector<double> a, std::vector<double> b) {
  FourierBody f;
  f.kind = FourierKind::Support;
  f.N = int(a.size()) - 1;
  if (f.N < 1 || int(b.size()) != f.N) throw Error("FourierBody: need |a| = N+1 >= 2 and |b| = N");
  f.a = std::move(a);
  f.b = std::move(b);
  return f;
}

FourierBody FourierBody::gauge(std::vector<double> a, std::vector<double> b) {
  FourierBody f = support(std::move(a), std::move(b));
  f.kind = FourierKind::Gauge;
  return f;
}

FourierBody FourierBody::disk(double r, int N, FourierKind kind) {
  FourierBody f;
  f.kind = kind;
  f.N = std::max(N, 1);
  f.a.assign(f.N + 1, 0.0);
  f.b.assign(f.N, 0.0);
  f.a[0] = (kind == FourierKind::Support) ? r : 1.0 / r;
  return f;
}

double FourierBody::eval(double theta) const {
  double s = a[0];
  for (int k = 1; k <= N; ++k)
    s += a[k] * std::cos(k * theta) + b[k - 1] * std::sin(k * theta);
  return s;
}

double FourierBody::deriv(double theta) const {
  double s = 0.0;
  for (int k = 1; k <= N; ++k)
    s += k * (-a[k] * std::sin(k * theta) + b[k - 1] * std::cos(k * theta));
  return s;
}

double FourierBody::deriv2(double theta) const {
  double s = 0.0;
  for (int k = 1; k <= N; ++k)
    s -= k * k * (a[k] * std::cos(k * theta) + b[k - 1] * std::sin(k * theta));
  return s;
}

double FourierBody::curvature_residual(double theta) const {
  double s = a[0];
  for (int k = 1; k <= N; ++k)
    s += (1.0 - double(k) * k) * (a[k] * std::cos(k * theta) + b[k - 1] * std::sin(k * theta));
  return s;
}

double FourierBody::min_curvature_residual(int M) const {
  double m = curvature_residual(0.0);
  for (int i = 1; i < M; ++i) m = std::min(m, curvature_residual(kTwoPi * i / M));
  return m;
}

bool FourierBody::grid_convex(int M) const {
  const double tol = kConvexityTolScale * std::abs(a[0]);
  return min_curvature_residual(M) >= -tol;
}

std::vector<double> FourierBody::coeffs() const {
  std::vector<double> c(a);
  c.insert(c.end(), b.begin(), b.end());
  return c;
}

FourierBody FourierBody::from_coeffs(FourierKind kind, const std::vector<double>& c) {
  if (c.size() < 3 || c.size() % 2 == 0) throw Error("from_coeffs: length must be odd and >= 3");
  const int N = (int(c.size()) - 1) / 2;
  FourierBody f;
  f.kind = kind;
  f.N = N;
  f.a.assign(c.begin(), c.begin() + N + 1);
  f.b.assign(c.begin() + N + 1, c.end());
  return f;
}

FourierBody FourierBody::scaled(double s) const {
  FourierBody f = *this;
  const double m = (kind == FourierKind::Support) ? s : 1.0 / s;
  for (double& v : f.a) v *= m;
  for (double& v : f.b) v *= m;
  return f;
}

FourierBody FourierBody::rotated(double delta) const {
  FourierBody f = *this;
  for (int k = 1; k <= N; ++k) {
    const double c = std::cos(k * delta), s = std::sin(k * delta);
    f.a[k] = a[k] * c - b[k - 1] * s;
    f.b[k - 1] = a[k] * s + b[k - 1] * c;
  }
  return f;
}

// ---- PolygonBody / RadialBody ----------------------------------------------

bool PolygonBody::is_simple_positive() const {
  return count() >= 3 && polygon_signed_area(vertices) > 0.0;
}

static double polygon_mean_radius(const std::vector<Vec2>& v) {
  const Vec2 c = polygon_centroid(v);
  double s = 0.0;
  for (const Vec2& p : v) s += dist(p, c);
  return s / double(v.size());
}

bool PolygonBody::is_convex(double tol) const {
  const int n = count();
  if (n < 3) return false;
  if (tol < 0.0) {
    const double r = polygon_mean_radius(vertices);
    tol = kConvexityTolScale * r * r;
  }
  for (int k = 0; k < n; ++k) {
    const Vec2& prev = vertices[(k + n - 1) % n];
    const Vec2& cur = vertices[k];
    const Vec2& next = vertices[(k + 1) % n];
    const double r = (prev.x - cur.x) * (next.y - cur.y) - (prev.y - cur.y) * (next.x - cur.x);
    if (r > tol) return false;
  }
  return true;
}

PolygonBody PolygonBody::scaled(double s) const {
  PolygonBody p = *this;
  for (Vec2& v : p.vertices) v = v * s;
  return p;
}

bool RadialBody::all_positive() const {
  for (double r : rho)
    if (!(r > 0.0)) return false;
  return count() >= 3;
}

bool RadialBody::is_convex(double tol) const {
  const int M = count();
  if (M < 3) return false;
  if (tol < 0.0) {
    double mean = 0.0;
    for (double r : rho) mean += r;
    mean /= M;
    tol = kConvexityTolScale * mean * mean;
  }
  const double c = 2.0 * std::cos(kTwoPi / M);
  for (int k = 0; k < M; ++k) {
    const double rm = rho[(k + M - 1) % M], r0 = rho[k], rp = rho[(k + 1) % M];
    if (c * rm * rp - r0 * (rm + rp) > tol) return false;
  }
  return true;
}

RadialBody RadialBody::scaled(double s) const {
  RadialBody r = *this;
  for (double& v : r.rho) v *= s;
  return r;
}

// ---- boundary traces --------------------------------------------------------

BoundaryTrace boundary_trace_of_polygon(const PolygonBody& poly) {
  const int n = poly.count();
  BoundaryTrace t;
  t.points = poly.vertices;
  t.normals.resize(n);
  t.weights.resize(n);
  t.midpoints.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec2& p = poly.vertices[i];
    const Vec2& q = poly.vertices[(i + 1) % n];
    const double len = dist(p, q);
    if (!(len > 0.0)) throw DegeneratePolygon("boundary trace: zero-length edge");
    t.weights[i] = len;
    t.normals[i] = Vec2{q.y - p.y, p.x - q.x} / len;  // outward for CCW
    t.midpoints[i] = (p + q) * 0.5;
  }
  return t;
}

BoundaryTrace boundary_from_support(const FourierBody& body, int M) {
  if (body.kind != FourierKind::Support)
    throw Error("boundary_from_support: support body expected");
  for (int m = 0; m < M; ++m) {
    if (body.curvature_residual(kTwoPi * m / M) <= 0.0)
      throw NonStrictlyConvex("boundary_from_support: h''+h <= 0 on the grid");
  }
  BoundaryTrace t;
  t.points.resize(M);
  t.normals.resize(M);
  t.weights.resize(M);
  t.midpoints.resize(M);
  for (int m = 0; m < M; ++m) {
    const double th = kTwoPi * m / M;
    const double h = body.eval(th), hp = body.deriv(th);
    const double c = std::cos(th), s = std::sin(th);
    t.points[m] = {h * c - hp * s, h * s + hp * c};
  }
  for (int m = 0; m < M; ++m) {
    const Vec2& p = t.points[m];
    const Vec2& q = t.points[(m + 1) % M];
    const double len = dist(p, q);
    t.weights[m] = len;
    // exact normal of the smooth parametrization at the segment's mid angle
    const double tm = kTwoPi * (m + 0.5) / M;
    t.normals[m] = {std::cos(tm), std::sin(tm)};
    t.midpoints[m] = (p + q) * 0.5;
  }
  return t;
}

PolygonBody polygon_from_support(const FourierBody& body, int M) {
  return PolygonBody{boundary_from_support(body, M).points};
}

PolygonBody polygon_from_radial(const RadialBody& body) {
  const int M = body.count();
  PolygonBody p;
  p.vertices.resize(M);
  for (int k = 0; k < M; ++k) {
    const double th = body.theta(k);
    p.vertices[k] = {body.rho[k] * std::cos(th), body.rho[k] * std::sin(th)};
  }
  return p;
}

PolygonBody polygon_from_gauge(const FourierBody& body, int M) {
  if (body.kind != FourierKind::Gauge) throw Error("polygon_from_gauge: gauge body expected");
  PolygonBody p;
  p.vertices.resize(M);
  for (int k = 0; k < M; ++k) {
    const double th = kTwoPi * k / M;
    const double g = body.eval(th);
    if (!(g > 0.0)) throw NonPositiveGauge("polygon_from_gauge: g <= 0 on the grid");
    p.vertices[k] = {std::cos(th) / g, std::sin(th) / g};
  }
  return p;
}

FourierBody minkowski_sum_support(const FourierBody& h1, const FourierBody& h2) {
  if (h1.kind != FourierKind::Support || h2.kind != FourierKind::Support)
    throw Error("minkowski_sum_support: support bodies expected");
  const int N = std::max(h1.N, h2.N);
  FourierBody f = FourierBody::disk(0.0, N);
  for (int k = 0; k <= N; ++k)
    f.a[k] = (k <= h1.N ? h1.a[k] : 0.0) + (k <= h2.N ? h2.a[k] : 0.0);
  for (int k = 1; k <= N; ++k)
    f.b[k - 1] = (k <= h1.N ? h1.b[k - 1] : 0.0) + (k <= h2.N ? h2.b[k - 1] : 0.0);
  return f;
}

double hausdorff_support(const FourierBody& h1, const FourierBody& h2) {
  const int M = std::max(4096, 16 * std::max(h1.N, h2.N));
  double d = 0.0;
  for (int m = 0; m < M; ++m) {
    const double th = kTwoPi * m / M;
    d = std::max(d, std::abs(h1.eval(th) - h2.eval(th)));
  }
  return d;
}

double polygon_support(const PolygonBody& poly, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  double h = -std::numeric_limits<double>::infinity();
  for (const Vec2& v : poly.vertices) h = std::max(h, v.x * c + v.y * s);
  return h;
}

SupportFit fit_support_from_polygon(const PolygonBody& poly, int N) {
  if (!poly.is_simple_positive() || !poly.is_convex())
    throw NonConvexInput("fit_support_from_polygon: convex CCW polygon expected");
  const int Ns = std::max(N, 1);  // stored order; N=0 requests a constant fit
  const int cols = (N == 0) ? 1 : 2 * Ns + 1;
  const int rows = std::max(8 * Ns, 8);
  Eigen::MatrixXd G(rows, cols);
  Eigen::VectorXd y(rows);
  for (int m = 0; m < rows; ++m) {
    const double th = kTwoPi * m / rows;
    y(m) = polygon_support(poly, th);
    G(m, 0) = 1.0;
    if (N > 0) {
      for (int k = 1; k <= Ns; ++k) {
        G(m, k) = std::cos(k * th);
        G(m, Ns + k) = std::sin(k * th);
      }
    }
  }
  Eigen::VectorXd c = G.colPivHouseholderQr().solve(y);
  SupportFit fit;
  std::vector<double> a(Ns + 1, 0.0), b(Ns, 0.0);
  a[0] = c(0);
  if (N > 0) {
    for (int k = 1; k <= Ns; ++k) {
      a[k] = c(k);
      b[k - 1] = c(Ns + k);
    }
  }
  fit.body = FourierBody::support(std::move(a), std::move(b));
  fit.residual = std::sqrt((G * c - y).squaredNorm() / rows);
  return fit;
}

// ---- normalization ----------------------------------------------------------

static double normalize_scale(double value, NormalizeTarget target) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw DegenerateBody("normalize: nonpositive functional value");
  return (target == NormalizeTarget::Diameter) ? 1.0 / value : 1.0 / std::sqrt(value);
}

FourierBody normalize(const FourierBody& body, NormalizeTarget target) {
  double v;
  if (body.kind == FourierKind::Support) {
    const GeoSummary g = support_functionals(body);
    v = (target == NormalizeTarget::Diameter) ? *g.d : g.A;
  } else {
    const PolygonBody poly = polygon_from_gauge(body);
    const GeoSummary g = polygon_functionals(poly);
    v = (target == NormalizeTarget::Diameter) ? *g.d : g.A;
  }
  return body.scaled(normalize_scale(v, target));
}

PolygonBody normalize(const PolygonBody& body, NormalizeTarget target) {
  const GeoSummary g = polygon_functionals(body);
  const double v = (target == NormalizeTarget::Diameter) ? *g.d : g.A;
  return body.scaled(normalize_scale(v, target));
}

RadialBody normalize(const RadialBody& body, NormalizeTarget target) {
  const GeoSummary g = radial_functionals(body);
  const double v = (target == NormalizeTarget::Diameter) ? *g.d : g.A;
  return body.scaled(normalize_scale(v, target));
}

PolygonBody rounded_polygon(const PolygonBody& poly, double radius, int corner_points) {
  if (!poly.is_convex()) throw NonConvexInput("rounded_polygon: convex CCW polygon expected");
  if (!(radius > 0.0)) return poly;
  const int n = poly.count();
  PolygonBody out;
  for (int i = 0; i < n; ++i) {
    const Vec2& prev = poly.vertices[(i + n - 1) % n];
    const Vec2& cur = poly.vertices[i];
    const Vec2& next = poly.vertices[(i + 1) % n];
    const Vec2 din = cur - prev, dout = next - cur;
    const Vec2 nin = Vec2{din.y, -din.x} / din.norm();
    const Vec2 nout = Vec2{dout.y, -dout.x} / dout.norm();
    const double a0 = std::atan2(nin.y, nin.x);
    double sweep = std::atan2(nout.y, nout.x) - a0;
    sweep -= kTwoPi * std::floor(sweep / kTwoPi);
    if (sweep < 1e-9) {  // collinear run: a single offset point
      out.vertices.push_back(cur + radius * Vec2{std::cos(a0), std::sin(a0)});
      continue;
    }
    const int pts = std::max(1, int(std::ceil(sweep / kTwoPi * 4 * corner_points)));
    for (int q = 0; q <= pts; ++q) {
      const double a = a0 + sweep * q / pts;
      out.vertices.push_back(cur + radius * Vec2{std::cos(a), std::sin(a)});
    }
  }
  // drop numerically duplicate consecutive vertices
  PolygonBody clean;
  for (const Vec2& v : out.vertices) {
    if (clean.vertices.empty() || dist(clean.vertices.back(), v) > 1e-12 * (1.0 + radius))
      clean.vertices.push_back(v);
  }
  while (clean.count() > 1 &&
         dist(clean.vertices.front(), clean.vertices.back()) <= 1e-12 * (1.0 + radius))
    clean.vertices.pop_back();
  return clean;
}

// ---- ray casting ------------------------------------------------------------

double ray_to_boundary(const PolygonBody& poly, const Vec2& origin, double theta) {
  const Vec2 u{std::cos(theta), std::sin(theta)};
  const int n = poly.count();
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    const Vec2 e = b - a;
    const double denom = cross(u, e);
    if (denom == 0.0) continue;
    const Vec2 ao = a - origin;
    const double t = cross(ao, e) / denom;
    const double s = cross(ao, u) / denom;
    if (t > 0.0 && s >= -1e-12 && s <= 1.0 + 1e-12) best = std::max(best, t);
  }
  if (best <= 0.0) throw DegenerateBody("ray_to_boundary: origin outside the polygon");
  return best;
}

RadialBody radial_from_polygon(const PolygonBody& poly, const Vec2& origin, int M) {
  RadialBody r;
  r.rho.resize(M);
  for (int k = 0; k < M; ++k) r.rho[k] = ray_to_boundary(poly, origin, kTwoPi * k / M);
  return r;
}

}  // namespace shapeopt
