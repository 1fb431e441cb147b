#pragma once

#include <optional>

#include "shapeopt/bodies.hpp"

namespace shapeopt {

// Values of the geometric functionals for one body. Fields that a given
// representation does not provide stay empty (width is only available for
// support bodies, lambda1 is filled by the spectral module).
struct GeoSummary {
  double P = 0.0;
  double A = 0.0;
  std::optional<double> d;
  std::optional<double> w;
  std::optional<double> lambda1;
};

// P = 2 pi a0 exactly; A from the coefficient formula
//   pi a0^2 + (pi/2) sum (1-k^2)(a_k^2+b_k^2);
// d and w as max / min over the grid of h(t)+h(t+pi), polished by a local
// golden-section search. Throws NegativeArea when the coefficient formula
// yields A <= 0.
GeoSummary support_functionals(const FourierBody& body, int Mgrid = kSupportGridM);

// Area from the coefficient formula only (valid even when negative).
double support_area(const FourierBody& body);

double support_diameter(const FourierBody& body, int Mgrid = kSupportGridM);
double support_width(const FourierBody& body, int Mgrid = kSupportGridM);
// Argmax angle of h(t)+h(t+pi) (diameter direction), polished.
double support_diameter_direction(const FourierBody& body, int Mgrid = kSupportGridM);

// Trapezoidal quadrature of P = int sqrt(g^2+g'^2)/g^2 and
// A = (1/2) int 1/g^2 on M uniform nodes. Throws NonPositiveGauge.
GeoSummary gauge_functionals(const FourierBody& body, int M = kPolygonGridM);

// Exact edge-length sum, shoelace area and brute-force pairwise diameter.
// Throws DegeneratePolygon on zero area.
GeoSummary polygon_functionals(const PolygonBody& poly);

// Closed-form sums on the uniform radial grid:
//   A = (1/2) sin(2pi/M) sum rho_k rho_{k+1},
//   P = sum sqrt(rho_k^2 + rho_{k+1}^2 - 2 rho_k rho_{k+1} cos(2pi/M)),
// diameter by the O(M^2) pairwise scan.
GeoSummary radial_functionals(const RadialBody& body);

// Rotating-calipers diameter of a convex CCW polygon, O(M).
// Throws NonConvexInput.
double shamos_diameter(const PolygonBody& poly);

double brute_force_diameter(const PolygonBody& poly);

}  // namespace shapeopt
