#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "shapeopt/bodies.hpp"

namespace shapeopt {

enum class Relation { LessEq, Equal };

// Dense linear constraint block: row . x (rel) rhs, one relation per row.
struct LinearSystem {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> A;
  Eigen::VectorXd rhs;
  std::vector<Relation> rel;

  int rows() const { return int(A.rows()); }
  int cols() const { return int(A.cols()); }
  // residual of row i at x: A.row(i).x - rhs(i)  (<= 0 feasible for LessEq)
  double residual(int i, const Eigen::VectorXd& x) const { return A.row(i).dot(x) - rhs(i); }
  void append(const LinearSystem& other);
};

// Family of quadratic residuals c_k(x) <= 0 with analytic gradients.
struct QuadResidualSet {
  int count = 0;
  int var_count = 0;
  std::function<double(const Eigen::VectorXd&, int)> value;
  // accumulate d c_k / d x into grad (grad must be zero-initialized by caller)
  std::function<void(const Eigen::VectorXd&, int, Eigen::VectorXd&)> gradient;
};

// M rows encoding -(h''+h)(theta_m) <= 0 over the support coefficients
// (a0..aN, b1..bN); entries are the sign-flipped alpha/beta coefficients
// (1-k^2)cos(k theta_m), (1-k^2)sin(k theta_m).
LinearSystem support_convexity_rows(int N, int M = kSupportGridM);

// M' rows h(theta_m) + h(theta_m + pi) <= d0 using the (1+(-1)^k) structure,
// plus one equality row pinning the diameter direction at theta = 0.
LinearSystem support_diameter_rows(int N, int Mprime, double d0);

// One equality row 2 pi a0 = p0.
LinearSystem support_perimeter_row(int N, double p0);

// Cross-product convexity residuals over flattened vertex coordinates
// (x0,y0,...,x_{M-1},y_{M-1}).
QuadResidualSet polygon_convexity(int M);

// Quadratic radial convexity residuals
//   C_k = 2 cos(2pi/M) rho_{k-1} rho_{k+1} - rho_k (rho_{k-1}+rho_{k+1}) <= 0.
QuadResidualSet radial_convexity(int M);

}  // namespace shapeopt
