#include "shapeopt/spectral.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <unordered_map>

#include "shapeopt/errors.hpp"

namespace shapeopt {

double TriMesh::tri_area(int t) const {
  const Vec2& a = nodes[tris[t][0]];
  const Vec2& b = nodes[tris[t][1]];
  const Vec2& c = nodes[tris[t][2]];
  return 0.5 * cross(b - a, c - a);
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (int t = 0; t < tri_count(); ++t) s += tri_area(t);
  return s;
}

void TriMesh::validate() const {
  for (int t = 0; t < tri_count(); ++t)
    if (!(tri_area(t) > 0.0)) throw MeshFailure("mesh: nonpositive triangle area");
  if (boundary.empty()) throw MeshFailure("mesh: empty boundary");
  for (size_t i = 0; i < boundary.size(); ++i) {
    if (boundary[i].b != boundary[(i + 1) % boundary.size()].a)
      throw MeshFailure("mesh: boundary loop not closed");
  }
  std::vector<char> used(nodes.size(), 0);
  for (const auto& t : tris)
    for (int v : t) used[v] = 1;
  for (char u : used)
    if (!u) throw MeshFailure("mesh: orphan node");
}

// ---- Delaunay (Bowyer-Watson with walk location) ----------------------------

namespace {

struct DTri {
  int v[3];   // CCW
  int nb[3];  // nb[j] across edge (v[j], v[(j+1)%3]); -1 on the hull
};

struct Delaunay {
  std::vector<Vec2> pts;
  std::vector<DTri> tris;
  int last = 0;  // walk start hint

  static double orient(const Vec2& a, const Vec2& b, const Vec2& p) {
    return cross(b - a, p - a);
  }

  static double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
    const double ax = a.x - p.x, ay = a.y - p.y;
    const double bx = b.x - p.x, by = b.y - p.y;
    const double cx = c.x - p.x, cy = c.y - p.y;
    const double a2 = ax * ax + ay * ay;
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
  }

  // Fan triangulation of a convex CCW boundary chain 0..n-1 around an interior
  // apex (node n). A ring vertex cannot serve as apex: resampled points along
  // a straight polygon edge would make the incident fan triangles degenerate.
  void init_fan(const std::vector<Vec2>& boundary, const Vec2& apex) {
    pts = boundary;
    pts.push_back(apex);
    const int n = int(boundary.size());
    tris.clear();
    for (int i = 0; i < n; ++i) {
      DTri t;
      t.v[0] = i;
      t.v[1] = (i + 1) % n;
      t.v[2] = n;                       // apex
      t.nb[0] = -1;                     // hull edge (i, i+1)
      t.nb[1] = (i + 1) % n;            // across ((i+1)%n, apex)
      t.nb[2] = (i + n - 1) % n;        // across (apex, i)
      tris.push_back(t);
    }
    last = 0;
  }

  int locate(const Vec2& p) const {
    int t = last;
    for (int step = 0; step < int(tris.size()) + 8; ++step) {
      bool moved = false;
      for (int j = 0; j < 3; ++j) {
        const Vec2& a = pts[tris[t].v[j]];
        const Vec2& b = pts[tris[t].v[(j + 1) % 3]];
        if (orient(a, b, p) < 0.0) {
          const int nb = tris[t].nb[j];
          if (nb < 0) return -1;
          t = nb;
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    // walk failed (should not happen for interior points); exhaustive scan
    for (int i = 0; i < int(tris.size()); ++i) {
      bool in = true;
      for (int j = 0; j < 3 && in; ++j)
        in = orient(pts[tris[i].v[j]], pts[tris[i].v[(j + 1) % 3]], p) >= 0.0;
      if (in) return i;
    }
    return -1;
  }

  int slot_of_edge(int t, int x, int y) const {
    for (int j = 0; j < 3; ++j)
      if (tris[t].v[j] == x && tris[t].v[(j + 1) % 3] == y) return j;
    throw MeshFailure("delaunay: broken adjacency");
  }

  // Lawson flip of edge j of triangle t against its neighbor. Returns the two
  // triangles carrying the new diagonal.
  std::pair<int, int> flip(int t, int j) {
    const int u = tris[t].nb[j];
    const int a = tris[t].v[j], b = tris[t].v[(j + 1) % 3], c = tris[t].v[(j + 2) % 3];
    const int ju = slot_of_edge(u, b, a);
    const int d = tris[u].v[(ju + 2) % 3];
    const int T1 = tris[t].nb[(j + 1) % 3], T2 = tris[t].nb[(j + 2) % 3];
    const int U1 = tris[u].nb[(ju + 1) % 3], U2 = tris[u].nb[(ju + 2) % 3];
    tris[t] = {{c, a, d}, {T2, U1, u}};
    tris[u] = {{d, b, c}, {U2, T1, t}};
    if (U1 >= 0) tris[U1].nb[slot_of_edge(U1, d, a)] = t;
    if (T1 >= 0) tris[T1].nb[slot_of_edge(T1, c, b)] = u;
    return {t, u};
  }

  bool edge_illegal(int t, int j) const {
    const int u = tris[t].nb[j];
    if (u < 0) return false;
    const int a = tris[t].v[j], b = tris[t].v[(j + 1) % 3];
    const int ju = slot_of_edge(u, b, a);
    const int d = tris[u].v[(ju + 2) % 3];
    return incircle(pts[tris[t].v[0]], pts[tris[t].v[1]], pts[tris[t].v[2]], pts[d]) > 0.0;
  }

  // legalize the edge of `t` opposite the vertex `p`, recursing outward
  void legalize(int t, int p, std::vector<std::pair<int, int>>& work) {
    work.clear();
    work.emplace_back(t, p);
    while (!work.empty()) {
      auto [ti, pi] = work.back();
      work.pop_back();
      int j = -1;
      for (int k = 0; k < 3; ++k)
        if (tris[ti].v[k] == pi) j = (k + 1) % 3;  // edge opposite pi
      if (j < 0) continue;
      if (!edge_illegal(ti, j)) continue;
      auto [x, y] = flip(ti, j);
      work.emplace_back(x, pi);
      work.emplace_back(y, pi);
    }
  }

  // full legalization sweep, used to make the initial fan Delaunay
  void legalize_all() {
    bool changed = true;
    int rounds = 0;
    while (changed && rounds++ < 200) {
      changed = false;
      for (int t = 0; t < int(tris.size()); ++t) {
        for (int j = 0; j < 3; ++j) {
          if (tris[t].nb[j] < t) continue;  // visit each edge once
          if (edge_illegal(t, j)) {
            flip(t, j);
            changed = true;
            break;
          }
        }
      }
    }
  }

  // Returns false if the point was skipped (degenerate location).
  bool insert(const Vec2& p, std::vector<std::pair<int, int>>& work) {
    const int t = locate(p);
    if (t < 0) return false;
    const int a = tris[t].v[0], b = tris[t].v[1], c = tris[t].v[2];
    // refuse points (numerically) on an edge of the containing triangle
    if (orient(pts[a], pts[b], p) <= 0.0 || orient(pts[b], pts[c], p) <= 0.0 ||
        orient(pts[c], pts[a], p) <= 0.0)
      return false;
    const int pi = int(pts.size());
    pts.push_back(p);

    // 1-3 split: t -> (a,b,p), t1 -> (b,c,p), t2 -> (c,a,p)
    const int A = tris[t].nb[0], B = tris[t].nb[1], C = tris[t].nb[2];
    const int t1 = int(tris.size()), t2 = t1 + 1;
    tris[t] = {{a, b, pi}, {A, t1, t2}};
    tris.push_back({{b, c, pi}, {B, t2, t}});
    tris.push_back({{c, a, pi}, {C, t, t1}});
    if (B >= 0) tris[B].nb[slot_of_edge(B, c, b)] = t1;
    if (C >= 0) tris[C].nb[slot_of_edge(C, a, c)] = t2;
    last = t;

    legalize(t, pi, work);
    legalize(t1, pi, work);
    legalize(t2, pi, work);
    return true;
  }

  TriMesh finish(int boundary_count) const {
    TriMesh m;
    m.nodes = pts;
    for (const DTri& t : tris) m.tris.push_back({t.v[0], t.v[1], t.v[2]});

    // boundary edges are consecutive pairs of the first boundary_count nodes
    std::map<std::pair<int, int>, int> edge_tri;
    for (int t = 0; t < int(m.tris.size()); ++t)
      for (int j = 0; j < 3; ++j)
        edge_tri[{m.tris[t][j], m.tris[t][(j + 1) % 3]}] = t;
    m.is_boundary_node.assign(m.nodes.size(), 0);
    for (int i = 0; i < boundary_count; ++i) {
      const int a = i, b = (i + 1) % boundary_count;
      const auto it = edge_tri.find({a, b});
      if (it == edge_tri.end()) throw MeshFailure("delaunay: missing boundary edge");
      TriMesh::BoundaryEdge e;
      e.a = a;
      e.b = b;
      e.tri = it->second;
      const Vec2 d = m.nodes[b] - m.nodes[a];
      e.length = d.norm();
      e.normal = Vec2{d.y, -d.x} / e.length;
      e.midpoint = (m.nodes[a] + m.nodes[b]) * 0.5;
      m.boundary.push_back(e);
      m.is_boundary_node[a] = 1;
    }
    return m;
  }
};

std::vector<Vec2> resample_boundary(const PolygonBody& poly, double h) {
  std::vector<Vec2> out;
  const int n = poly.count();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    const double len = dist(a, b);
    const int pieces = std::max(1, int(std::ceil(len / h)));
    for (int k = 0; k < pieces; ++k) out.push_back(a + (b - a) * (double(k) / pieces));
  }
  return out;
}

// deterministic tiny jitter to break hex-lattice cocircularity
double hash_jitter(int i, int j, int salt) {
  std::uint64_t x = (std::uint64_t(unsigned(i)) << 32) ^ unsigned(j) ^ (std::uint64_t(salt) << 17);
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return (double(x >> 11) * 0x1.0p-53 - 0.5);
}

}  // namespace

TriMesh mesh_polygon(const PolygonBody& poly, double h) {
  if (poly.count() < 3 || !(polygon_signed_area(poly.vertices) > 0.0))
    throw MeshFailure("mesh_polygon: degenerate polygon");
  if (!(h > 0.0)) throw MeshFailure("mesh_polygon: h > 0 expected");

  const std::vector<Vec2> ring = resample_boundary(poly, h);
  const Vec2 apex = polygon_centroid(poly.vertices);
  Delaunay dt;
  dt.init_fan(ring, apex);
  dt.legalize_all();

  // precompute inward edge normals for the lattice distance filter
  const int n = poly.count();
  std::vector<Vec2> en(n);
  std::vector<double> eoff(n);
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    const Vec2 d = b - a;
    const Vec2 inward = Vec2{-d.y, d.x} / d.norm();
    en[i] = inward;
    eoff[i] = dot(inward, a);
  }
  const auto boundary_clearance = [&](const Vec2& p) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) m = std::min(m, dot(en[i], p) - eoff[i]);
    return m;  // > 0 inside
  };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Vec2& v : poly.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }

  const double row = h * std::sqrt(3.0) / 2.0;
  std::vector<std::pair<int, int>> work;
  for (int j = 0;; ++j) {
    const double y = ymin + row * (j + 0.5);
    if (y > ymax) break;
    for (int i = 0;; ++i) {
      const double x = xmin + h * (i + ((j % 2) ? 0.75 : 0.25));
      if (x > xmax) break;
      Vec2 p{x + 1e-4 * h * hash_jitter(i, j, 1), y + 1e-4 * h * hash_jitter(i, j, 2)};
      if (boundary_clearance(p) < 0.5 * h) continue;
      if (dist(p, apex) < 0.25 * h) continue;
      dt.insert(p, work);
    }
  }

  TriMesh mesh = dt.finish(int(ring.size()));
  mesh.validate();
  const double area = std::abs(polygon_signed_area(poly.vertices));
  if (std::abs(mesh.total_area() - area) > 1e-9 * area)
    throw MeshFailure("mesh_polygon: mesh area mismatch");
  return mesh;
}

double mesh_size_for_triangles(double area, int tris) {
  // equilateral-lattice estimate: T ~= 4 A / (sqrt(3) h^2)
  return std::sqrt(4.0 * area / (std::sqrt(3.0) * tris));
}

const TriMesh& disk_reference_mesh(int target_triangles) {
  static std::mutex mu;
  static std::map<int, TriMesh> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(target_triangles);
  if (it != cache.end()) return it->second;

  const double h = mesh_size_for_triangles(kPi, target_triangles);
  const int nb = std::max(16, int(std::ceil(kTwoPi / h)));
  PolygonBody circle;
  circle.vertices.resize(nb);
  for (int i = 0; i < nb; ++i) {
    const double th = kTwoPi * i / nb;
    circle.vertices[i] = {std::cos(th), std::sin(th)};
  }
  // boundary spacing already ~h, so mesh_polygon keeps exactly these vertices
  TriMesh m = mesh_polygon(circle, h * 1.0001);
  auto [pos, ok] = cache.emplace(target_triangles, std::move(m));
  (void)ok;
  return pos->second;
}

TriMesh mesh_mapped(const PolygonBody& poly, const Vec2& origin, const TriMesh& disk_ref) {
  TriMesh m = disk_ref;
  const int n = poly.count();
  // polar angles of the polygon vertices around origin (strictly increasing
  // along the boundary for a star-shaped polygon)
  std::vector<double> ang(n);
  for (int i = 0; i < n; ++i) {
    const Vec2 d = poly.vertices[i] - origin;
    ang[i] = std::atan2(d.y, d.x);
  }
  int start = 0;
  for (int i = 1; i < n; ++i)
    if (ang[i] < ang[start]) start = i;

  const auto rho_at = [&](double phi) {
    // wedge lookup: find the edge whose angular span contains phi
    double rel = phi - ang[start];
    rel -= kTwoPi * std::floor(rel / kTwoPi);
    int lo = 0, hi = n;  // edges start..start+n-1
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      double am = ang[(start + mid) % n] - ang[start];
      am -= kTwoPi * std::floor(am / kTwoPi);
      if (am <= rel)
        lo = mid;
      else
        hi = mid;
    }
    const int i = (start + lo) % n;
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    const Vec2 u{std::cos(phi), std::sin(phi)};
    const Vec2 e = b - a;
    const double denom = cross(u, e);
    if (denom != 0.0) {
      const double t = cross(a - origin, e) / denom;
      if (t > 0.0) return t;
    }
    return ray_to_boundary(poly, origin, phi);  // rare fallback
  };

  for (Vec2& p : m.nodes) {
    const double r = p.norm();
    if (r == 0.0) {
      p = origin;
      continue;
    }
    const double phi = std::atan2(p.y, p.x);
    p = origin + (r * rho_at(phi)) * Vec2{std::cos(phi), std::sin(phi)};
  }
  for (auto& e : m.boundary) {
    const Vec2 d = m.nodes[e.b] - m.nodes[e.a];
    e.length = d.norm();
    e.normal = Vec2{d.y, -d.x} / e.length;
    e.midpoint = (m.nodes[e.a] + m.nodes[e.b]) * 0.5;
  }
  m.validate();
  return m;
}

// ---- P1 FEM -----------------------------------------------------------------

namespace {

void p1_gradients(const Vec2& a, const Vec2& b, const Vec2& c, double area, Vec2 g[3]) {
  const double inv = 1.0 / (2.0 * area);
  g[0] = {(b.y - c.y) * inv, (c.x - b.x) * inv};
  g[1] = {(c.y - a.y) * inv, (a.x - c.x) * inv};
  g[2] = {(a.y - b.y) * inv, (b.x - a.x) * inv};
}

}  // namespace

static std::vector<double> recover_boundary_gradsq(const Eigen::VectorXd& u, double lam,
                                                   const TriMesh& mesh,
                                                   const Eigen::SparseMatrix<double>& Kf,
                                                   const Eigen::SparseMatrix<double>& Mf);

EigResult lambda1(const TriMesh& mesh, const Eigen::VectorXd* u0) {
  const int nn = mesh.node_count();
  std::vector<int> idx(nn, -1);
  int ni = 0;
  for (int i = 0; i < nn; ++i)
    if (!mesh.is_boundary_node[i]) idx[i] = ni++;
  if (ni == 0) throw MeshFailure("lambda1: no interior nodes");

  std::vector<Eigen::Triplet<double>> tk, tm, tkf, tmf;
  tk.reserve(mesh.tri_count() * 9);
  tm.reserve(mesh.tri_count() * 9);
  tkf.reserve(mesh.tri_count() * 9);
  tmf.reserve(mesh.tri_count() * 9);
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& tri = mesh.tris[t];
    const Vec2 &a = mesh.nodes[tri[0]], &b = mesh.nodes[tri[1]], &c = mesh.nodes[tri[2]];
    const double area = 0.5 * cross(b - a, c - a);
    Vec2 g[3];
    p1_gradients(a, b, c, area, g);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double kij = area * dot(g[i], g[j]);
        const double mij = area / 12.0 * (i == j ? 2.0 : 1.0);
        tkf.emplace_back(tri[i], tri[j], kij);
        tmf.emplace_back(tri[i], tri[j], mij);
        const int I = idx[tri[i]], J = idx[tri[j]];
        if (I >= 0 && J >= 0) {
          tk.emplace_back(I, J, kij);
          tm.emplace_back(I, J, mij);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> K(ni, ni), M(ni, ni), Kf(nn, nn), Mf(nn, nn);
  K.setFromTriplets(tk.begin(), tk.end());
  M.setFromTriplets(tm.begin(), tm.end());
  Kf.setFromTriplets(tkf.begin(), tkf.end());
  Mf.setFromTriplets(tmf.begin(), tmf.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(K);
  if (solver.info() != Eigen::Success) throw SolverDivergence("lambda1: factorization failed");

  Eigen::VectorXd x = Eigen::VectorXd::Ones(ni);
  if (u0 && u0->size() == nn) {
    for (int i = 0; i < nn; ++i)
      if (idx[i] >= 0) x(idx[i]) = (*u0)(i);
    if (!(x.norm() > 0.0)) x.setOnes();
  }
  x /= std::sqrt(x.dot(M * x));
  double lam = x.dot(K * x);
  int it = 0;
  for (; it < 500; ++it) {
    Eigen::VectorXd y = solver.solve(M * x);
    const double mn = std::sqrt(y.dot(M * y));
    if (!(mn > 0.0)) throw SolverDivergence("lambda1: iteration collapsed");
    x = y / mn;
    const double lam_new = x.dot(K * x);
    const bool done = std::abs(lam_new - lam) <= 1e-10 * std::abs(lam_new);
    lam = lam_new;
    if (done) break;
  }
  if (it >= 500) throw SolverDivergence("lambda1: inverse iteration did not converge");

  if (x(0) < 0) x = -x;  // fix sign; the first eigenfunction has one sign
  EigResult r;
  r.lambda1 = lam;
  r.iterations = it + 1;
  r.u = Eigen::VectorXd::Zero(nn);
  for (int i = 0; i < nn; ++i)
    if (idx[i] >= 0) r.u(i) = x(idx[i]);
  // Rayleigh quotient recomputed on the reduced system
  r.rayleigh = x.dot(K * x) / x.dot(M * x);
  r.boundary_gradsq = recover_boundary_gradsq(r.u, lam, mesh, Kf, Mf);
  return r;
}

// Variational flux recovery: on the boundary u = 0, so grad u = (du/dn) n, and
// Green's identity gives, for each boundary hat function phi_i,
//   (K u - lambda M u)_i = int_dOmega (du/dn) phi_i dsigma.
// Solving the 1D boundary mass system for the nodal du/dn values is an order
// of accuracy better than reading the gradient off the adjacent triangle,
// which the Rellich and Hadamard quadrature contracts need.
static std::vector<double> recover_boundary_gradsq(const Eigen::VectorXd& u, double lam,
                                                   const TriMesh& mesh,
                                                   const Eigen::SparseMatrix<double>& Kf,
                                                   const Eigen::SparseMatrix<double>& Mf) {
  const int nb = int(mesh.boundary.size());
  std::vector<int> bidx(mesh.node_count(), -1);
  for (int e = 0; e < nb; ++e) bidx[mesh.boundary[e].a] = e;  // one entry per boundary node

  const Eigen::VectorXd resid = Kf * u - lam * (Mf * u);
  Eigen::VectorXd rhs(nb);
  for (int e = 0; e < nb; ++e) rhs(e) = resid(mesh.boundary[e].a);

  std::vector<Eigen::Triplet<double>> tb;
  tb.reserve(4 * nb);
  for (int e = 0; e < nb; ++e) {
    const int ia = bidx[mesh.boundary[e].a], ib = bidx[mesh.boundary[e].b];
    const double L = mesh.boundary[e].length;
    tb.emplace_back(ia, ia, L / 3.0);
    tb.emplace_back(ib, ib, L / 3.0);
    tb.emplace_back(ia, ib, L / 6.0);
    tb.emplace_back(ib, ia, L / 6.0);
  }
  Eigen::SparseMatrix<double> Mb(nb, nb);
  Mb.setFromTriplets(tb.begin(), tb.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> bsolver;
  bsolver.compute(Mb);
  if (bsolver.info() != Eigen::Success)
    throw SolverDivergence("boundary flux recovery: factorization failed");
  const Eigen::VectorXd gn = bsolver.solve(rhs);  // nodal du/dn

  std::vector<double> out(nb, 0.0);
  for (int e = 0; e < nb; ++e) {
    const double ga = gn(bidx[mesh.boundary[e].a]);
    const double gb = gn(bidx[mesh.boundary[e].b]);
    const double mid = 0.5 * (ga + gb);
    out[e] = mid * mid;
  }
  return out;
}

std::vector<double> boundary_gradsq(const EigResult& eig, const TriMesh& mesh) {
  // reassemble the full matrices; standalone path of the in-solver recovery
  std::vector<Eigen::Triplet<double>> tkf, tmf;
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& tri = mesh.tris[t];
    const Vec2 &a = mesh.nodes[tri[0]], &b = mesh.nodes[tri[1]], &c = mesh.nodes[tri[2]];
    const double area = 0.5 * cross(b - a, c - a);
    Vec2 g[3];
    p1_gradients(a, b, c, area, g);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        tkf.emplace_back(tri[i], tri[j], area * dot(g[i], g[j]));
        tmf.emplace_back(tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0));
      }
  }
  Eigen::SparseMatrix<double> Kf(mesh.node_count(), mesh.node_count());
  Eigen::SparseMatrix<double> Mf(mesh.node_count(), mesh.node_count());
  Kf.setFromTriplets(tkf.begin(), tkf.end());
  Mf.setFromTriplets(tmf.begin(), tmf.end());
  return recover_boundary_gradsq(eig.u, eig.lambda1, mesh, Kf, Mf);
}

void dump_mesh(const TriMesh& mesh, std::ostream& os) {
  char buf[128];
  for (const Vec2& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.12g %.12g\n", p.x, p.y);
    os << buf;
  }
  for (const auto& t : mesh.tris) {
    std::snprintf(buf, sizeof buf, "%d %d %d\n", t[0], t[1], t[2]);
    os << buf;
  }
}

EigResult lambda1_of_polygon(const PolygonBody& poly, int target_triangles) {
  const double area = std::abs(polygon_signed_area(poly.vertices));
  const TriMesh mesh = mesh_polygon(poly, mesh_size_for_triangles(area, target_triangles));
  return lambda1(mesh);
}

// ---- BoundaryGradField -------------------------------------------------------

BoundaryGradField::BoundaryGradField(const TriMesh& mesh, const EigResult& eig,
                                     const Vec2& origin)
    : mesh_(&mesh), origin_(origin), values_(eig.boundary_gradsq) {
  const int nb = int(mesh.boundary.size());
  order_.resize(nb);
  for (int i = 0; i < nb; ++i) order_[i] = i;
  std::vector<double> ang(nb);
  for (int i = 0; i < nb; ++i) {
    const Vec2 d = mesh.nodes[mesh.boundary[i].a] - origin;
    ang[i] = std::atan2(d.y, d.x);
  }
  std::sort(order_.begin(), order_.end(), [&](int a, int b) { return ang[a] < ang[b]; });
  start_angle_.resize(nb);
  for (int i = 0; i < nb; ++i) start_angle_[i] = ang[order_[i]];
}

double BoundaryGradField::at_angle(double phi) const {
  phi = std::atan2(std::sin(phi), std::cos(phi));
  const auto it = std::upper_bound(start_angle_.begin(), start_angle_.end(), phi);
  const int pos = (it == start_angle_.begin()) ? int(start_angle_.size()) - 1
                                               : int(it - start_angle_.begin()) - 1;
  return values_[order_[pos]];
}

double BoundaryGradField::at_point(const Vec2& p) const {
  const Vec2 d = p - origin_;
  return at_angle(std::atan2(d.y, d.x));
}

}  // namespace shapeopt
