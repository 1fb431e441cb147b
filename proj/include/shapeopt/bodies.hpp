#pragma once

#include <vector>

#include "shapeopt/geo.hpp"

namespace shapeopt {

// Default angular grid sizes. Support-function constraints and diameter rows
// are discretized on kSupportGridM angles; gauge/radial bodies are
// polygonalized on kPolygonGridM vertices.
inline constexpr int kSupportGridM = 1000;
inline constexpr int kPolygonGridM = 200;

// Relative slack admitted in discrete convexity residuals.
inline constexpr double kConvexityTolScale = 1e-9;

enum class FourierKind { Support, Gauge };

// Truncated Fourier parametrization of a support or gauge function:
//   f(theta) = a[0] + sum_{k=1..N} (a[k] cos k theta + b[k-1] sin k theta).
struct FourierBody {
  FourierKind kind = FourierKind::Support;
  int N = 1;
  std::vector<double> a;  // length N+1
  std::vector<double> b;  // length N

  static FourierBody support(std::vector<double> a, std::vector<double> b);
  static FourierBody gauge(std::vector<double> a, std::vector<double> b);
  // Disk of radius r as a support body (gauge body for kind=Gauge).
  static FourierBody disk(double r, int N, FourierKind kind = FourierKind::Support);

  double eval(double theta) const;
  double deriv(double theta) const;
  double deriv2(double theta) const;
  // f''(theta) + f(theta); >= 0 characterizes convexity for both kinds.
  double curvature_residual(double theta) const;

  // Minimum of f''+f over the M-point uniform grid.
  double min_curvature_residual(int M = kSupportGridM) const;
  bool grid_convex(int M = kSupportGridM) const;

  int coeff_count() const { return 2 * N + 1; }
  // Flat coefficient vector (a0..aN, b1..bN) used by the optimizer.
  std::vector<double> coeffs() const;
  static FourierBody from_coeffs(FourierKind kind, const std::vector<double>& c);

  FourierBody scaled(double s) const;
  // Rotation by delta: the returned body's function is f(theta - delta)... i.e.
  // the body rotated by +delta.
  FourierBody rotated(double delta) const;
};

// Explicit vertex polygon, counter-clockwise.
struct PolygonBody {
  std::vector<Vec2> vertices;

  int count() const { return int(vertices.size()); }
  bool is_simple_positive() const;  // positive signed area
  // All cross-product residuals <= tol (tol scaled by mean radius if negative).
  bool is_convex(double tol = -1.0) const;
  PolygonBody scaled(double s) const;
};

// Star-shaped body given by M radii on the uniform angular grid
// theta_k = 2 pi k / M.
struct RadialBody {
  std::vector<double> rho;

  int count() const { return int(rho.size()); }
  double theta(int k) const { return kTwoPi * k / count(); }
  bool all_positive() const;
  // Quadratic convexity residuals C_k <= tol for all k.
  bool is_convex(double tol = -1.0) const;
  RadialBody scaled(double s) const;
};

// Sampled boundary with outward unit normals, segment lengths and segment
// midpoints, as consumed by the discretized Hadamard integrals.
struct BoundaryTrace {
  std::vector<Vec2> points;     // closed chain, size M
  std::vector<Vec2> normals;    // per segment [i, i+1], unit
  std::vector<double> weights;  // segment lengths dsigma
  std::vector<Vec2> midpoints;  // segment midpoints I_k

  int segment_count() const { return int(weights.size()); }
};

BoundaryTrace boundary_trace_of_polygon(const PolygonBody& poly);

// ---- operations -----------------------------------------------------------

// Boundary points of a strictly convex support body via
//   x = h cos - h' sin,  y = h sin + h' cos,
// with normal (cos theta, sin theta) at parameter theta.
// Throws NonStrictlyConvex when h''+h <= 0 somewhere on the grid.
BoundaryTrace boundary_from_support(const FourierBody& body, int M = kPolygonGridM);
PolygonBody polygon_from_support(const FourierBody& body, int M = kPolygonGridM);

PolygonBody polygon_from_radial(const RadialBody& body);

// Vertices (cos/g, sin/g) on the uniform grid. Throws NonPositiveGauge.
PolygonBody polygon_from_gauge(const FourierBody& body, int M = kPolygonGridM);

// Support functions add under Minkowski sums: coefficient-wise sum.
FourierBody minkowski_sum_support(const FourierBody& h1, const FourierBody& h2);

// Hausdorff distance = sup |h1 - h2| over a dense angle grid.
double hausdorff_support(const FourierBody& h1, const FourierBody& h2);

// Least-squares Fourier fit of the exact polygon support function
// max_k <A_k, (cos,sin)> sampled on max(8N, 8) angles. Throws NonConvexInput.
struct SupportFit {
  FourierBody body;
  double residual = 0.0;  // rms fit residual
};
SupportFit fit_support_from_polygon(const PolygonBody& poly, int N);

// Exact support function of a polygon.
double polygon_support(const PolygonBody& poly, double theta);

enum class NormalizeTarget { Diameter, Area };

FourierBody normalize(const FourierBody& body, NormalizeTarget target);
PolygonBody normalize(const PolygonBody& body, NormalizeTarget target);
RadialBody normalize(const RadialBody& body, NormalizeTarget target);

// Minkowski sum of a convex CCW polygon with a disk of the given radius:
// edges offset outward, corners replaced by arcs. Used to spread corner
// curvature over a width that a truncated Fourier series can resolve.
PolygonBody rounded_polygon(const PolygonBody& poly, double radius, int corner_points = 8);

// Radial distance from `origin` to the polygon boundary along direction
// `theta`. The polygon must be star-shaped around `origin`.
double ray_to_boundary(const PolygonBody& poly, const Vec2& origin, double theta);

RadialBody radial_from_polygon(const PolygonBody& poly, const Vec2& origin, int M = kPolygonGridM);

}  // namespace shapeopt
