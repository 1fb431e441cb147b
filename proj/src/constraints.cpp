#include "shapeopt/constraints.hpp"

#include <cmath>

#include "shapeopt/errors.hpp"

namespace shapeopt {

void LinearSystem::append(const LinearSystem& other) {
  if (rows() == 0) {
    *this = other;
    return;
  }
  if (other.cols() != cols()) throw Error("LinearSystem::append: column mismatch");
  const int r0 = rows();
  A.conservativeResize(r0 + other.rows(), Eigen::NoChange);
  rhs.conservativeResize(r0 + other.rows());
  A.bottomRows(other.rows()) = other.A;
  rhs.tail(other.rows()) = other.rhs;
  rel.insert(rel.end(), other.rel.begin(), other.rel.end());
}

LinearSystem support_convexity_rows(int N, int M) {
  if (N < 1 || M < 1) throw Error("support_convexity_rows: N, M >= 1 expected");
  LinearSystem sys;
  sys.A.setZero(M, 2 * N + 1);
  sys.rhs.setZero(M);
  sys.rel.assign(M, Relation::LessEq);
  for (int m = 0; m < M; ++m) {
    const double th = kTwoPi * m / M;
    sys.A(m, 0) = -1.0;
    for (int k = 1; k <= N; ++k) {
      const double w = 1.0 - double(k) * k;
      sys.A(m, k) = -w * std::cos(k * th);
      sys.A(m, N + k) = -w * std::sin(k * th);
    }
  }
  return sys;
}

LinearSystem support_diameter_rows(int N, int Mprime, double d0) {
  if (!(d0 > 0.0)) throw Error("support_diameter_rows: d0 > 0 expected");
  LinearSystem sys;
  sys.A.setZero(Mprime + 1, 2 * N + 1);
  sys.rhs.setConstant(Mprime + 1, d0);
  sys.rel.assign(Mprime + 1, Relation::LessEq);
  for (int m = 0; m < Mprime; ++m) {
    const double th = kTwoPi * m / Mprime;
    sys.A(m, 0) = 2.0;
    for (int k = 1; k <= N; ++k) {
      const double w = 1.0 + ((k % 2 == 0) ? 1.0 : -1.0);  // 1+(-1)^k
      sys.A(m, k) = w * std::cos(k * th);
      sys.A(m, N + k) = w * std::sin(k * th);
    }
  }
  // equality pinning the diameter direction at theta = 0
  sys.A(Mprime, 0) = 2.0;
  for (int k = 1; k <= N; ++k) sys.A(Mprime, k) = 1.0 + ((k % 2 == 0) ? 1.0 : -1.0);
  sys.rel[Mprime] = Relation::Equal;
  return sys;
}

LinearSystem support_perimeter_row(int N, double p0) {
  LinearSystem sys;
  sys.A.setZero(1, 2 * N + 1);
  sys.A(0, 0) = kTwoPi;
  sys.rhs.setConstant(1, p0);
  sys.rel.assign(1, Relation::Equal);
  return sys;
}

QuadResidualSet polygon_convexity(int M) {
  if (M < 3) throw Error("polygon_convexity: M >= 3 expected");
  QuadResidualSet set;
  set.count = M;
  set.var_count = 2 * M;
  set.value = [M](const Eigen::VectorXd& v, int k) {
    const int km = (k + M - 1) % M, kp = (k + 1) % M;
    const double xm = v[2 * km], ym = v[2 * km + 1];
    const double x0 = v[2 * k], y0 = v[2 * k + 1];
    const double xp = v[2 * kp], yp = v[2 * kp + 1];
    return (xm - x0) * (yp - y0) - (ym - y0) * (xp - x0);
  };
  set.gradient = [M](const Eigen::VectorXd& v, int k, Eigen::VectorXd& g) {
    const int km = (k + M - 1) % M, kp = (k + 1) % M;
    const double xm = v[2 * km], ym = v[2 * km + 1];
    const double x0 = v[2 * k], y0 = v[2 * k + 1];
    const double xp = v[2 * kp], yp = v[2 * kp + 1];
    g[2 * km] += (yp - y0);
    g[2 * km + 1] += -(xp - x0);
    g[2 * k] += -(yp - y0) + (ym - y0);
    g[2 * k + 1] += -(xm - x0) + (xp - x0);
    g[2 * kp] += -(ym - y0);
    g[2 * kp + 1] += (xm - x0);
  };
  return set;
}

QuadResidualSet radial_convexity(int M) {
  if (M < 3) throw Error("radial_convexity: M >= 3 expected");
  const double c = 2.0 * std::cos(kTwoPi / M);
  QuadResidualSet set;
  set.count = M;
  set.var_count = M;
  set.value = [M, c](const Eigen::VectorXd& r, int k) {
    const double rm = r[(k + M - 1) % M], r0 = r[k], rp = r[(k + 1) % M];
    return c * rm * rp - r0 * (rm + rp);
  };
  set.gradient = [M, c](const Eigen::VectorXd& r, int k, Eigen::VectorXd& g) {
    const int km = (k + M - 1) % M, kp = (k + 1) % M;
    const double rm = r[km], r0 = r[k], rp = r[kp];
    g[km] += c * rp - r0;
    g[k] += -(rm + rp);
    g[kp] += c * rm - r0;
  };
  return set;
}

}  // namespace shapeopt
