#include "shapeopt/derivatives.hpp"

#include <cmath>

#include "shapeopt/errors.hpp"
#include "shapeopt/functionals.hpp"

namespace shapeopt {

Eigen::VectorXd grad_support_area(const FourierBody& body) {
  const int N = body.N;
  Eigen::VectorXd g(2 * N + 1);
  g(0) = kTwoPi * body.a[0];
  for (int k = 1; k <= N; ++k) {
    const double w = kPi * (1.0 - double(k) * k);
    g(k) = w * body.a[k];
    g(N + k) = w * body.b[k - 1];
  }
  return g;
}

Eigen::VectorXd grad_support_perimeter(const FourierBody& body) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * body.N + 1);
  g(0) = kTwoPi;
  return g;
}

Eigen::VectorXd grad_support_lambda1(const FourierBody& body, const BoundaryGradField& field,
                                     int Mq) {
  const int N = body.N;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * N + 1);
  const double dth = kTwoPi / Mq;
  for (int i = 0; i < Mq; ++i) {
    const double th = (i + 0.5) * dth;
    const double R = body.curvature_residual(th);
    const double h = body.eval(th), hp = body.deriv(th);
    const double c = std::cos(th), s = std::sin(th);
    const Vec2 x{h * c - hp * s, h * s + hp * c};
    const double v = field.at_point(x) * R * dth;
    g(0) -= v;
    for (int k = 1; k <= N; ++k) {
      g(k) -= v * std::cos(k * th);
      g(N + k) -= v * std::sin(k * th);
    }
  }
  return g;
}

Eigen::VectorXd grad_gauge_area(const FourierBody& body, int M) {
  const int N = body.N;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * N + 1);
  for (int i = 0; i < M; ++i) {
    const double th = kTwoPi * i / M;
    const double gv = body.eval(th);
    if (!(gv > 0.0)) throw NonPositiveGauge("grad_gauge_area: g <= 0");
    const double w = -kTwoPi / M / (gv * gv * gv);  // d/dg of (pi/M) 1/g^2 times dg
    g(0) += w;
    for (int k = 1; k <= N; ++k) {
      g(k) += w * std::cos(k * th);
      g(N + k) += w * std::sin(k * th);
    }
  }
  return g;
}

Eigen::VectorXd grad_gauge_perimeter(const FourierBody& body, int M) {
  const int N = body.N;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * N + 1);
  for (int i = 0; i < M; ++i) {
    const double th = kTwoPi * i / M;
    const double gv = body.eval(th);
    if (!(gv > 0.0)) throw NonPositiveGauge("grad_gauge_perimeter: g <= 0");
    const double gp = body.deriv(th);
    const double root = std::sqrt(gv * gv + gp * gp);
    // F = root / g^2; dF = (g dg + g' dg')/(root g^2) - 2 root dg / g^3
    const double wg = gv / (root * gv * gv) - 2.0 * root / (gv * gv * gv);
    const double wgp = gp / (root * gv * gv);
    const double scale = kTwoPi / M;
    g(0) += scale * wg;
    for (int k = 1; k <= N; ++k) {
      const double ck = std::cos(k * th), sk = std::sin(k * th);
      g(k) += scale * (wg * ck + wgp * (-k * sk));
      g(N + k) += scale * (wg * sk + wgp * (k * ck));
    }
  }
  return g;
}

Eigen::VectorXd grad_gauge_lambda1(const FourierBody& body, const BoundaryGradField& field,
                                   int M) {
  const int N = body.N;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(2 * N + 1);
  const PolygonBody poly = polygon_from_gauge(body, M);
  const BoundaryTrace tr = boundary_trace_of_polygon(poly);
  for (int e = 0; e < tr.segment_count(); ++e) {
    const double th = kTwoPi * (e + 0.5) / M;  // midpoint parameter of edge e
    const double gv = body.eval(th);
    const Vec2 dir{std::cos(th), std::sin(th)};
    const double vn = dot(dir, tr.normals[e]);
    const double u2 = field.at_point(tr.midpoints[e]);
    // field for coefficient c is -trig(k th)/g^3 * dir
    const double base = u2 * vn * tr.weights[e] / (gv * gv * gv);
    grad(0) += base;  // minus (from the field) times minus (Hadamard) cancel
    for (int k = 1; k <= N; ++k) {
      grad(k) += base * std::cos(k * th);
      grad(N + k) += base * std::sin(k * th);
    }
  }
  return grad;
}

Eigen::VectorXd grad_vertices_area(const PolygonBody& poly) {
  const int M = poly.count();
  Eigen::VectorXd g(2 * M);
  for (int k = 0; k < M; ++k) {
    const Vec2& prev = poly.vertices[(k + M - 1) % M];
    const Vec2& next = poly.vertices[(k + 1) % M];
    g(2 * k) = 0.5 * (next.y - prev.y);
    g(2 * k + 1) = 0.5 * (prev.x - next.x);
  }
  return g;
}

Eigen::VectorXd grad_vertices_perimeter(const PolygonBody& poly) {
  const int M = poly.count();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * M);
  for (int k = 0; k < M; ++k) {
    const Vec2& a = poly.vertices[k];
    const Vec2& b = poly.vertices[(k + 1) % M];
    const double len = dist(a, b);
    if (!(len > 0.0)) throw DegeneratePolygon("grad_vertices_perimeter: zero edge");
    const Vec2 u = (a - b) / len;
    g(2 * k) += u.x;
    g(2 * k + 1) += u.y;
    g(2 * ((k + 1) % M)) -= u.x;
    g(2 * ((k + 1) % M) + 1) -= u.y;
  }
  return g;
}

Eigen::VectorXd grad_vertices_lambda1(const PolygonBody& poly, const TriMesh& mesh,
                                      const EigResult& eig, const Vec2& origin) {
  const int M = poly.count();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * M);

  // polygon edge lookup by polar angle around the origin
  std::vector<double> ang(M);
  for (int i = 0; i < M; ++i) {
    const Vec2 d = poly.vertices[i] - origin;
    ang[i] = std::atan2(d.y, d.x);
  }
  int start = 0;
  for (int i = 1; i < M; ++i)
    if (ang[i] < ang[start]) start = i;
  const auto edge_of = [&](const Vec2& p) {
    const Vec2 d = p - origin;
    double rel = std::atan2(d.y, d.x) - ang[start];
    rel -= kTwoPi * std::floor(rel / kTwoPi);
    int lo = 0, hi = M;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      double am = ang[(start + mid) % M] - ang[start];
      am -= kTwoPi * std::floor(am / kTwoPi);
      if (am <= rel)
        lo = mid;
      else
        hi = mid;
    }
    return (start + lo) % M;
  };

  for (size_t e = 0; e < mesh.boundary.size(); ++e) {
    const auto& be = mesh.boundary[e];
    const double u2 = eig.boundary_gradsq[e];
    const int k = edge_of(be.midpoint);
    const Vec2& A = poly.vertices[k];
    const Vec2& B = poly.vertices[(k + 1) % M];
    const Vec2 ev = B - A;
    const double s = std::clamp(dot(be.midpoint - A, ev) / ev.squared_norm(), 0.0, 1.0);
    // hat of vertex k is (1-s), of vertex k+1 is s, along this sub-edge
    const double w = u2 * be.length;
    g(2 * k) -= w * (1.0 - s) * be.normal.x;
    g(2 * k + 1) -= w * (1.0 - s) * be.normal.y;
    g(2 * ((k + 1) % M)) -= w * s * be.normal.x;
    g(2 * ((k + 1) % M) + 1) -= w * s * be.normal.y;
  }
  return g;
}

Eigen::VectorXd grad_radial_area(const RadialBody& body) {
  const int M = body.count();
  Eigen::VectorXd g(M);
  const double w = 0.5 * std::sin(kTwoPi / M);
  for (int k = 0; k < M; ++k)
    g(k) = w * (body.rho[(k + M - 1) % M] + body.rho[(k + 1) % M]);
  return g;
}

Eigen::VectorXd grad_radial_perimeter(const RadialBody& body) {
  const int M = body.count();
  const double c = std::cos(kTwoPi / M);
  Eigen::VectorXd g(M);
  for (int k = 0; k < M; ++k) {
    const double rm = body.rho[(k + M - 1) % M], r0 = body.rho[k], rp = body.rho[(k + 1) % M];
    const double lm = std::sqrt(rm * rm + r0 * r0 - 2.0 * rm * r0 * c);
    const double lp = std::sqrt(rp * rp + r0 * r0 - 2.0 * rp * r0 * c);
    g(k) = (r0 - rm * c) / lm + (r0 - rp * c) / lp;
  }
  return g;
}

Eigen::VectorXd grad_radial_lambda1(const RadialBody& body, const BoundaryGradField& field,
                                    int ell) {
  const int M = body.count();
  const PolygonBody poly = polygon_from_radial(body);
  const BoundaryTrace tr = boundary_trace_of_polygon(poly);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(M);
  for (int k = 0; k < M; ++k) {
    const Vec2 uk{std::cos(body.theta(k)), std::sin(body.theta(k))};
    double acc = 0.0;
    for (int i = 1; i <= ell; ++i) {
      const double s = (2.0 * i - 1.0) / (2.0 * ell);
      // edge k: field decays 1 -> 0 from A_k to A_{k+1}
      const Vec2 bk = poly.vertices[k] + (poly.vertices[(k + 1) % M] - poly.vertices[k]) * s;
      acc += field.at_point(bk) * (1.0 - s) * dot(uk, tr.normals[k]) * tr.weights[k] / ell;
      // edge k-1: field grows 0 -> 1 from A_{k-1} to A_k
      const int km = (k + M - 1) % M;
      const Vec2 bkm = poly.vertices[km] + (poly.vertices[k] - poly.vertices[km]) * s;
      acc += field.at_point(bkm) * s * dot(uk, tr.normals[km]) * tr.weights[km] / ell;
    }
    g(k) = -acc;
  }
  return g;
}

DiameterDerivative diameter_directional(const PolygonBody& body, const PerturbationField& V) {
  const auto& v = body.vertices;
  const int n = int(v.size());
  double d2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d2 = std::max(d2, (v[i] - v[j]).squared_norm());
  const double d = std::sqrt(d2);
  const double cut = (1.0 - kDiameterPairSlack) * d;

  DiameterDerivative out;
  out.rate = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec2 diff = v[i] - v[j];
      const double len = diff.norm();
      if (len < cut) continue;
      const double r = dot(diff / len, V(v[i]) - V(v[j]));
      if (r > out.rate) {
        out.rate = r;
        out.i = i;
        out.j = j;
      }
    }
  return out;
}

}  // namespace shapeopt
