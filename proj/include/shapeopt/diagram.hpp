#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "shapeopt/bodies.hpp"
#include "shapeopt/errors.hpp"
#include "shapeopt/optimize.hpp"

namespace shapeopt {

enum class DiagramId { D1, D2, D3 };

std::string diagram_name(DiagramId id);

// D1: (P, A) with d = 1;  D2: (P, lambda1) with A = 1;  D3: (d, lambda1) with A = 1.

// ---- random clouds ----------------------------------------------------------

struct CloudOptions {
  int min_sides = 3;
  int max_sides = 30;
  int fem_triangles = 4000;  // lambda evaluations for D2/D3
};

struct CloudPoint {
  double x = 0.0, y = 0.0;
  std::uint64_t seed = 0;  // per-item generator seed (shape provenance)
};

struct DiagramCloud {
  DiagramId id = DiagramId::D1;
  std::vector<CloudPoint> points;
};

// n convex hulls of uniform disk samples, resampled until the side count lies
// in [min_sides, max_sides], normalized to the diagram's constraint.
DiagramCloud random_cloud(DiagramId id, int n, std::uint64_t seed, const CloudOptions& opts = {});

// The polygon behind one cloud item (for provenance / reproduction).
PolygonBody cloud_polygon(DiagramId id, std::uint64_t item_seed, const CloudOptions& opts = {});

// Per-item generator seed derived from the master seed.
std::uint64_t cloud_item_seed(std::uint64_t master, int index);

// ---- boundary sweeps --------------------------------------------------------

struct PhaseSpec {
  enum class Kind { Support, Radial, Vertices };
  Kind kind = Kind::Support;
  int size = 80;  // N for support, M for radial/vertices
};

struct SweepOptions {
  // empty = per-diagram defaults: D1/D3 lower [support(80), radial(200)],
  // uppers [support(80)], D2 lower [support(80), vertices(32)]
  std::vector<PhaseSpec> phases_lower, phases_upper;
  SolveOptions solver{1e-7, 1e-6, 4000, 1e-4, false};
  int fem_triangles_opt = 4000;   // mapped-mesh size inside optimization
  int fem_triangles_eval = 20000; // final reported lambda values
  int support_constraint_M = kSupportGridM;
  int polygonalize_M = kPolygonGridM;
  double gap_fraction = 0.2;  // GapExceeded threshold
  bool warm_start = true;
  int repin_rounds = 5;       // diameter-direction re-pin limit
  int max_starts = 0;         // 0 = automatic; otherwise cap per-point starts
  bool lower_only = false, upper_only = false;
};

struct BoundaryPointRecord {
  bool ok = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string body_json;
  std::string phase;  // phase that produced the adopted value
  int iterations = 0;
  double violation = 0.0;
  // (phase name, value) for every phase that ran, in order
  std::vector<std::pair<std::string, double>> phase_values;
};

struct DiagramBoundary {
  DiagramId id = DiagramId::D1;
  std::vector<double> grid;
  std::vector<BoundaryPointRecord> lower, upper;
};

std::vector<double> default_grid(DiagramId id);

// GapExceeded specialization carrying the partial boundary, so callers can
// still write what was computed.
struct SweepGapExceeded : GapExceeded {
  DiagramBoundary partial;
  SweepGapExceeded(const std::string& msg, DiagramBoundary b)
      : GapExceeded(msg), partial(std::move(b)) {}
};

// Constraint sweep with warm starts; per-point failures are recorded as gaps.
// Throws SweepGapExceeded when more than gap_fraction of the points fail.
DiagramBoundary sweep(DiagramId id, const std::vector<double>& grid,
                      const SweepOptions& opts = {});

// Region between the curves as a closed polygon (lower forward, upper back).
// Throws GapInBoundary on gaps or curve crossings.
std::vector<Vec2> fill_region(const DiagramBoundary& b);

// ---- candidate families (D3) -------------------------------------------------

enum class D3Family { TwoCap, Slice };

// Normalized (A = 1) polygonal family member.
//  TwoCap: t = apex distance / disk radius, in [1, inf); t = 1 is the disk.
//  Slice:  t = strip width / disk diameter, in (0, 1]; t = 1 is the disk.
PolygonBody d3_family_body(D3Family fam, double t, int arc_points = 200);

// Family member with diameter d0 (A = 1), by root-finding on the parameter.
PolygonBody d3_family_at_diameter(D3Family fam, double d0, int arc_points = 200);

struct CandidateFamilies {
  std::vector<D3Family> families;
};
CandidateFamilies candidate_families(DiagramId id);  // D3 only

// ---- seed shapes --------------------------------------------------------------

// Symmetric lens (intersection of two equal disks) with diameter 1 and
// perimeter p in (2, pi].
PolygonBody lens_body(double p, int arc_points = 200);

// Isosceles triangle with two unit sides and perimeter p in (2, 3].
PolygonBody subequilateral_triangle(double p);

PolygonBody regular_polygon(int sides, double circumradius);

// Random strictly convex smooth body (mean radius 1) as a support or gauge
// Fourier function of order N; deterministic in the seed.
FourierBody random_fourier_body(std::uint64_t seed, int N,
                                FourierKind kind = FourierKind::Support);

// ---- CSV ----------------------------------------------------------------------

std::string cloud_csv(const DiagramCloud& cloud);
std::string boundary_csv(const DiagramBoundary& b);

// Final lambda1 of a polygon on the reporting mesh (Delaunay).
double lambda_of_body(const PolygonBody& poly, int fem_triangles = 20000);

}  // namespace shapeopt
