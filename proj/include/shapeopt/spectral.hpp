#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <vector>

#include "shapeopt/bodies.hpp"

namespace shapeopt {

// P1 triangulation of a polygonal body. Triangles are CCW; the boundary is a
// single closed CCW loop of edges, each carrying its unique adjacent triangle
// and the outward unit normal.
struct TriMesh {
  struct BoundaryEdge {
    int a = 0, b = 0;   // node indices, loop order
    int tri = 0;        // adjacent triangle
    Vec2 normal;        // outward unit normal
    double length = 0.0;
    Vec2 midpoint;
  };

  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<BoundaryEdge> boundary;
  std::vector<char> is_boundary_node;

  int node_count() const { return int(nodes.size()); }
  int tri_count() const { return int(tris.size()); }
  double tri_area(int t) const;
  double total_area() const;
  // Throws MeshFailure if an invariant is broken (nonpositive area, open
  // boundary loop, orphan node).
  void validate() const;
};

// Quasi-uniform Delaunay mesh of a convex polygon: boundary resampled at
// spacing <= h (keeping every polygon vertex), interior filled with a
// jittered hexagonal lattice. Throws MeshFailure on degenerate input.
TriMesh mesh_polygon(const PolygonBody& poly, double h);

// Reference unit-disk mesh with roughly `target_triangles` triangles; built
// once per target and cached.
const TriMesh& disk_reference_mesh(int target_triangles);

// Image of the reference disk mesh under the radial map
//   (r, phi) -> origin + r * rho(phi) * (cos phi, sin phi),
// where rho is the polygon's radial function around `origin`. Node positions
// depend smoothly on the polygon vertices and the topology is fixed, which
// keeps lambda1 differentiable along shape-perturbation paths.
TriMesh mesh_mapped(const PolygonBody& poly, const Vec2& origin, const TriMesh& disk_ref);

// Mesh size giving approximately `tris` triangles for a body of area `area`.
double mesh_size_for_triangles(double area, int tris);

struct EigResult {
  double lambda1 = 0.0;
  Eigen::VectorXd u;                   // nodal values, zero on the boundary
  std::vector<double> boundary_gradsq; // |grad u|^2 per boundary edge
  double rayleigh = 0.0;               // recomputed Rayleigh quotient of u
  int iterations = 0;
};

// Smallest Dirichlet eigenpair by inverse iteration on the interior-node
// generalized problem K u = lambda M u, with a sparse Cholesky factorization
// of K. The eigenvector is normalized in the mass norm. Throws
// SolverDivergence if the eigenvalue increments do not settle.
// `u0` (nodal values on the same node layout) warm-starts the iteration.
EigResult lambda1(const TriMesh& mesh, const Eigen::VectorXd* u0 = nullptr);

// Piecewise-constant |grad u|^2 per boundary edge, sampled from the unique
// adjacent triangle.
std::vector<double> boundary_gradsq(const EigResult& eig, const TriMesh& mesh);

// Plain-text dump: one node per line "x y", then one triangle per line
// "i j k" (zero-based).
void dump_mesh(const TriMesh& mesh, std::ostream& os);

// Convenience: mesh a polygon at a size giving ~target_triangles and solve.
EigResult lambda1_of_polygon(const PolygonBody& poly, int target_triangles = 20000);

// Boundary |grad u|^2 lookup by direction from an interior origin. Valid for
// star-shaped meshes (all meshes here are convex).
class BoundaryGradField {
 public:
  BoundaryGradField(const TriMesh& mesh, const EigResult& eig, const Vec2& origin);
  double at_angle(double phi) const;
  double at_point(const Vec2& p) const;
  const Vec2& origin() const { return origin_; }

 private:
  const TriMesh* mesh_;
  Vec2 origin_;
  std::vector<double> values_;       // per boundary edge
  std::vector<double> start_angle_;  // angle of edge start node, sorted order
  std::vector<int> order_;           // boundary index sorted by start angle
};

}  // namespace shapeopt
