#pragma once

#include <Eigen/Dense>
#include <functional>

#include "shapeopt/bodies.hpp"
#include "shapeopt/spectral.hpp"

namespace shapeopt {

enum class Functional { Area, Perimeter, Lambda1 };

// Boundary perturbation field: world point -> displacement.
struct PerturbationField {
  std::function<Vec2(const Vec2&)> eval;
  Vec2 operator()(const Vec2& p) const { return eval(p); }
};

// ---- support coefficients (a0..aN, b1..bN) ---------------------------------

Eigen::VectorXd grad_support_area(const FourierBody& body);
Eigen::VectorXd grad_support_perimeter(const FourierBody& body);
// Hadamard gradient: -int |grad u|^2 trig(k t) (h''+h) dt by midpoint
// quadrature on Mq angles; `field` is the boundary |grad u|^2 trace of the
// body's polygonalization.
Eigen::VectorXd grad_support_lambda1(const FourierBody& body, const BoundaryGradField& field,
                                     int Mq = kPolygonGridM);

// ---- gauge coefficients ------------------------------------------------------

// Analytic derivatives of the trapezoidal P/A quadratures on M nodes.
Eigen::VectorXd grad_gauge_area(const FourierBody& body, int M = kPolygonGridM);
Eigen::VectorXd grad_gauge_perimeter(const FourierBody& body, int M = kPolygonGridM);
// Hadamard sum with the -trig(k t)/g^3 radial fields on the M-gon boundary.
Eigen::VectorXd grad_gauge_lambda1(const FourierBody& body, const BoundaryGradField& field,
                                   int M = kPolygonGridM);

// ---- polygon vertices (x0,y0,...,x_{M-1},y_{M-1}) ---------------------------

Eigen::VectorXd grad_vertices_area(const PolygonBody& poly);
Eigen::VectorXd grad_vertices_perimeter(const PolygonBody& poly);
// Hadamard sum against the piecewise-linear hat field of each vertex; the
// mesh boundary sub-edges are weighted by the hat value at their midpoints.
Eigen::VectorXd grad_vertices_lambda1(const PolygonBody& poly, const TriMesh& mesh,
                                      const EigResult& eig, const Vec2& origin);

// ---- radial distances rho_0..rho_{M-1} ---------------------------------------

Eigen::VectorXd grad_radial_area(const RadialBody& body);
Eigen::VectorXd grad_radial_perimeter(const RadialBody& body);
// ell sub-segment midpoints per polygon edge (default 4).
Eigen::VectorXd grad_radial_lambda1(const RadialBody& body, const BoundaryGradField& field,
                                    int ell = 4);

// ---- diameter ---------------------------------------------------------------

struct DiameterDerivative {
  double rate = 0.0;
  int i = -1, j = -1;  // achieving vertex pair
};

// Directional shape derivative of the diameter: max over all
// diameter-realizing vertex pairs (slack 1e-9 d) of
// <(x-y)/|x-y|, V(x)-V(y)>.
DiameterDerivative diameter_directional(const PolygonBody& body, const PerturbationField& V);

inline constexpr double kDiameterPairSlack = 1e-9;

}  // namespace shapeopt
