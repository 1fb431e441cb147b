#include "shapeopt/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "shapeopt/derivatives.hpp"
#include "shapeopt/errors.hpp"
#include "shapeopt/functionals.hpp"
#include "shapeopt/json_io.hpp"
#include "shapeopt/spectral.hpp"

namespace shapeopt {

std::string diagram_name(DiagramId id) {
  switch (id) {
    case DiagramId::D1: return "d1";
    case DiagramId::D2: return "d2";
    case DiagramId::D3: return "d3";
  }
  return "?";
}

std::vector<double> default_grid(DiagramId id) {
  const auto linspace = [](double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
  };
  switch (id) {
    case DiagramId::D1: return linspace(2.05, kPi, 31);
    case DiagramId::D2: return linspace(2.0 * std::sqrt(kPi), 4.6, 25);
    case DiagramId::D3: return linspace(2.0 / std::sqrt(kPi), 2.2, 25);
  }
  return {};
}

// ---- random clouds -----------------------------------------------------------

std::uint64_t cloud_item_seed(std::uint64_t master, int index) {
  std::uint64_t x = master ^ (0x9e3779b97f4a7c15ULL * (std::uint64_t(index) + 1));
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  return x;
}

namespace {

PolygonBody random_hull(Rng& rng, int min_sides, int max_sides) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    // log-uniform raw point count spreads the hull side counts over the range
    const int m = std::max<int>(3, int(std::exp(rng.uniform(std::log(3.0), std::log(1200.0)))));
    std::vector<Vec2> pts;
    pts.reserve(m);
    while (int(pts.size()) < m) {
      const double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
      if (x * x + y * y <= 1.0) pts.push_back({x, y});
    }
    std::vector<Vec2> hull = convex_hull(pts);
    if (int(hull.size()) < min_sides || int(hull.size()) > max_sides) continue;
    if (!(polygon_signed_area(hull) > 1e-12)) continue;
    return PolygonBody{std::move(hull)};
  }
  throw Error("random_hull: could not draw a polygon in the side-count range");
}

}  // namespace

PolygonBody cloud_polygon(DiagramId id, std::uint64_t seed, const CloudOptions& opts) {
  Rng rng(seed);
  PolygonBody poly = random_hull(rng, opts.min_sides, opts.max_sides);
  return normalize(poly, id == DiagramId::D1 ? NormalizeTarget::Diameter : NormalizeTarget::Area);
}

DiagramCloud random_cloud(DiagramId id, int n, std::uint64_t seed, const CloudOptions& opts) {
  if (n < 1) throw Error("random_cloud: n >= 1 expected");
  DiagramCloud cloud;
  cloud.id = id;
  cloud.points.resize(n);

  const auto eval_item = [&](int i) {
    const std::uint64_t s = cloud_item_seed(seed, i);
    const PolygonBody poly = cloud_polygon(id, s, opts);
    const GeoSummary g = polygon_functionals(poly);
    CloudPoint pt;
    pt.seed = s;
    switch (id) {
      case DiagramId::D1:
        pt.x = g.P;
        pt.y = g.A;
        break;
      case DiagramId::D2:
        pt.x = g.P;
        pt.y = lambda1_of_polygon(poly, opts.fem_triangles).lambda1;
        break;
      case DiagramId::D3:
        pt.x = *g.d;
        pt.y = lambda1_of_polygon(poly, opts.fem_triangles).lambda1;
        break;
    }
    cloud.points[i] = pt;
  };

  // per-item seeds make the result independent of scheduling
  const int workers = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  if (workers > 1 && n > 8) {
    std::vector<std::future<void>> futs;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      futs.push_back(std::async(std::launch::async, [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) eval_item(i);
      }));
    for (auto& f : futs) f.get();
  } else {
    for (int i = 0; i < n; ++i) eval_item(i);
  }
  return cloud;
}

std::string cloud_csv(const DiagramCloud& cloud) {
  std::string out = "x,y,seed\n";
  char buf[128];
  for (const CloudPoint& p : cloud.points) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%llu\n", p.x, p.y,
                  (unsigned long long)p.seed);
    out += buf;
  }
  return out;
}

// ---- seed shapes and families --------------------------------------------------

PolygonBody regular_polygon(int sides, double circumradius) {
  PolygonBody p;
  p.vertices.resize(sides);
  for (int i = 0; i < sides; ++i) {
    const double th = kTwoPi * i / sides;
    p.vertices[i] = {circumradius * std::cos(th), circumradius * std::sin(th)};
  }
  return p;
}

FourierBody random_fourier_body(std::uint64_t seed, int N, FourierKind kind) {
  Rng rng(seed);
  std::vector<double> a(N + 1, 0.0), b(N, 0.0);
  a[0] = 1.0;
  for (int k = 1; k <= N; ++k) {
    const double env = 0.6 / (2.0 + double(k) * k);
    a[k] = env * rng.uniform(-1.0, 1.0);
    b[k - 1] = env * rng.uniform(-1.0, 1.0);
  }
  FourierBody body =
      kind == FourierKind::Support ? FourierBody::support(a, b) : FourierBody::gauge(a, b);
  // shrink the perturbation until the curvature residual has a real margin
  for (int guard = 0; guard < 64 && body.min_curvature_residual(2048) < 0.05; ++guard) {
    for (int k = 1; k <= N; ++k) {
      body.a[k] *= 0.7;
      body.b[k - 1] *= 0.7;
    }
  }
  return body;
}

PolygonBody lens_body(double p, int arc_points) {
  if (!(p > 2.0 && p <= kPi + 1e-12)) throw ParameterOutOfRange("lens_body: p in (2, pi]");
  // solve 2 alpha / sin(alpha) = p for the half-angle
  double lo = 1e-9, hi = kPi / 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (2.0 * mid / std::sin(mid) < p ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi);
  const double R = 0.5 / std::sin(alpha);
  const double c = R * std::cos(alpha);
  const int n = std::max(8, arc_points / 2);
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) {  // upper arc, right to left; center (0,-c)
    const double phi = kPi / 2 - alpha + (2.0 * alpha) * i / (n - 1.0);
    v.push_back({R * std::cos(phi), R * std::sin(phi) - c});
  }
  for (int i = 1; i + 1 < n; ++i) {  // lower arc = mirror, left to right
    const Vec2& q = v[n - 1 - i];
    v.push_back({q.x, -q.y});
  }
  return PolygonBody{std::move(v)};
}

PolygonBody subequilateral_triangle(double p) {
  if (!(p > 2.0 && p <= 3.0 + 1e-12))
    throw ParameterOutOfRange("subequilateral_triangle: p in (2, 3]");
  const double b = p - 2.0;
  PolygonBody t;
  t.vertices = {{0.0, 0.0}, {b, 0.0}, {b / 2.0, std::sqrt(1.0 - b * b / 4.0)}};
  return t;
}

PolygonBody d3_family_body(D3Family fam, double t, int arc_points) {
  std::vector<Vec2> v;
  if (fam == D3Family::TwoCap) {
    if (!(t >= 1.0) || !std::isfinite(t))
      throw ParameterOutOfRange("two-cap: parameter >= 1 expected");
    if (t == 1.0) {
      return normalize(regular_polygon(std::max(64, arc_points), 1.0), NormalizeTarget::Area);
    }
    const double phi_t = std::acos(1.0 / t);  // tangency angle, disk radius 1
    const int n = std::max(8, arc_points / 2);
    v.push_back({t, 0.0});
    for (int i = 0; i < n; ++i) {  // top arc between the tangency points
      const double phi = phi_t + (kPi - 2.0 * phi_t) * i / (n - 1.0);
      v.push_back({std::cos(phi), std::sin(phi)});
    }
    v.push_back({-t, 0.0});
    for (int i = 0; i < n; ++i) {  // bottom arc
      const double phi = kPi + phi_t + (kPi - 2.0 * phi_t) * i / (n - 1.0);
      v.push_back({std::cos(phi), std::sin(phi)});
    }
  } else {
    if (!(t > 0.0 && t <= 1.0)) throw ParameterOutOfRange("slice: parameter in (0, 1] expected");
    if (t == 1.0) {
      return normalize(regular_polygon(std::max(64, arc_points), 1.0), NormalizeTarget::Area);
    }
    const double half = t;  // half-width over disk radius 1 (strip width / diameter = t)
    const double gamma = std::asin(half);
    const int n = std::max(8, arc_points / 2);
    const int nc = std::max(2, arc_points / 8);
    for (int i = 0; i < n; ++i) {  // right arc, bottom corner to top corner
      const double phi = -gamma + 2.0 * gamma * i / (n - 1.0);
      v.push_back({std::cos(phi), std::sin(phi)});
    }
    const double x0 = std::cos(gamma);
    for (int i = 1; i + 1 < nc; ++i)  // top chord
      v.push_back({x0 - 2.0 * x0 * i / (nc - 1.0), half});
    for (int i = 0; i < n; ++i) {  // left arc
      const double phi = kPi - gamma + 2.0 * gamma * i / (n - 1.0);
      v.push_back({std::cos(phi), std::sin(phi)});
    }
    for (int i = 1; i + 1 < nc; ++i)  // bottom chord
      v.push_back({-x0 + 2.0 * x0 * i / (nc - 1.0), -half});
  }
  return normalize(PolygonBody{std::move(v)}, NormalizeTarget::Area);
}

PolygonBody d3_family_at_diameter(D3Family fam, double d0, int arc_points) {
  const double d_disk = 2.0 / std::sqrt(kPi);
  if (!(d0 >= d_disk - 1e-12))
    throw ParameterOutOfRange("d3 family: d0 >= 2/sqrt(pi) expected");
  const auto diam = [&](double t) {
    return *polygon_functionals(d3_family_body(fam, t, arc_points)).d;
  };
  if (d0 <= d_disk + 1e-12) return d3_family_body(fam, 1.0, arc_points);

  double lo, hi;
  if (fam == D3Family::TwoCap) {  // diameter increasing in t
    lo = 1.0;
    hi = 1.5;
    while (diam(hi) < d0) hi *= 1.5;
  } else {  // diameter decreasing in t on (0,1]
    hi = 1.0;
    lo = 0.5;
    while (diam(lo) < d0) lo *= 0.7;
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool below = diam(mid) < d0;
    if (fam == D3Family::TwoCap)
      (below ? lo : hi) = mid;
    else
      (below ? hi : lo) = mid;
  }
  return d3_family_body(fam, 0.5 * (lo + hi), arc_points);
}

CandidateFamilies candidate_families(DiagramId id) {
  if (id != DiagramId::D3)
    throw ParameterOutOfRange("candidate_families: defined for d3 only");
  return CandidateFamilies{{D3Family::TwoCap, D3Family::Slice}};
}

double lambda_of_body(const PolygonBody& poly, int fem_triangles) {
  return lambda1_of_polygon(poly, fem_triangles).lambda1;
}

// ---- lambda objective with per-vector memoization ------------------------------

namespace {

std::uint64_t hash_vec(const Eigen::VectorXd& x) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(x.data());
  for (size_t i = 0; i < sizeof(double) * x.size(); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

// Evaluates lambda1 on the smooth mapped mesh of the polygon produced from the
// optimization variables, with the matching Hadamard coefficient gradient.
class LambdaObjective {
 public:
  using PolyFn = std::function<PolygonBody(const Eigen::VectorXd&)>;
  using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, const PolygonBody&,
                                               const BoundaryGradField&)>;
  using AreaFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;
  // The optimized functional is lambda * A, the scale-invariant form of
  // lambda on the A = 1 constraint set: plain lambda blows up along the
  // shrink direction faster than any finite area penalty can counter.
  // origin_from_centroid: mapped-mesh origin is the centroid (support,
  // vertices); otherwise the radial origin (0,0).
  LambdaObjective(PolyFn poly_fn, GradFn grad_fn, AreaFn area_fn, bool origin_from_centroid,
                  int target_tris)
      : poly_fn_(std::move(poly_fn)),
        grad_fn_(std::move(grad_fn)),
        area_fn_(std::move(area_fn)),
        origin_from_centroid_(origin_from_centroid),
        ref_(disk_reference_mesh(target_tris)) {}

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
    const std::uint64_t key = hash_vec(x);
    Eigen::VectorXd ustart;
    {
      std::lock_guard<std::mutex> lock(mu_);
      const auto it = cache_.find(key);
      if (it != cache_.end()) {
        if (grad) *grad = it->second.second;
        return it->second.first;
      }
      ustart = last_u_;  // nearby shapes share the eigenvector shape
    }
    const PolygonBody poly = poly_fn_(x);
    const Vec2 origin = origin_from_centroid_ ? polygon_centroid(poly.vertices) : Vec2{0, 0};
    const TriMesh mesh = mesh_mapped(poly, origin, ref_);
    const EigResult eig = lambda1(mesh, ustart.size() ? &ustart : nullptr);
    const BoundaryGradField field(mesh, eig, origin);
    Eigen::VectorXd glam = grad_fn_(x, poly, field);
    Eigen::VectorXd gA(x.size());
    const double A = area_fn_(x, &gA);
    const double f = eig.lambda1 * A;
    Eigen::VectorXd g = A * glam + eig.lambda1 * gA;
    {
      std::lock_guard<std::mutex> lock(mu_);
      last_u_ = eig.u;
      if (cache_.size() > 64) cache_.clear();
      cache_[key] = {f, g};
    }
    if (grad) *grad = std::move(g);
    return f;
  }

 private:
  PolyFn poly_fn_;
  GradFn grad_fn_;
  AreaFn area_fn_;
  bool origin_from_centroid_;
  const TriMesh& ref_;
  mutable std::mutex mu_;
  mutable Eigen::VectorXd last_u_;
  mutable std::unordered_map<std::uint64_t, std::pair<double, Eigen::VectorXd>> cache_;
};

// Fourier fits of cornered shapes overshoot the discrete convexity rows
// (oscillatory tails make h''+h dip negative). The Fejer taper convolves the
// curvature measure with a positive kernel, which nearly restores feasibility
// while keeping the shape; a Gaussian damping loop handles what remains.
FourierBody smoothed_convex(FourierBody body, int Mgrid) {
  const double margin = 1e-6 * std::abs(body.a[0]);
  if (body.min_curvature_residual(Mgrid) >= margin) return body;
  FourierBody fej = body;
  for (int k = 1; k <= body.N; ++k) {
    const double w = 1.0 - double(k) / (body.N + 1);
    fej.a[k] = body.a[k] * w;
    fej.b[k - 1] = body.b[k - 1] * w;
  }
  body = fej;
  double t = 1e-6;
  for (int round = 0; round < 60; ++round) {
    if (body.min_curvature_residual(Mgrid) >= margin) return body;
    FourierBody damped = fej;
    for (int k = 1; k <= fej.N; ++k) {
      const double f = std::exp(-t * k * k);
      damped.a[k] = fej.a[k] * f;
      damped.b[k - 1] = fej.b[k - 1] * f;
    }
    body = damped;
    t *= 2.0;
  }
  return FourierBody::disk(body.a[0], body.N);
}

// boundary points of a support body without the strict-convexity gate; the
// optimizer visits slightly infeasible iterates and the mesh validation is the
// effective guard there
PolygonBody polygon_from_support_raw(const FourierBody& body, int M) {
  PolygonBody p;
  p.vertices.resize(M);
  for (int m = 0; m < M; ++m) {
    const double th = kTwoPi * m / M;
    const double h = body.eval(th), hp = body.deriv(th);
    const double c = std::cos(th), s = std::sin(th);
    p.vertices[m] = {h * c - hp * s, h * s + hp * c};
  }
  if (!(polygon_signed_area(p.vertices) > 0.0))
    throw NonStrictlyConvex("support polygonalization degenerate");
  return p;
}

// ---- phase drivers --------------------------------------------------------------

struct PhaseResult {
  bool ok = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  double violation = 1e30;
  int iterations = 0;
  PolygonBody poly;
  std::string body_json_text;
  std::optional<FourierBody> support_body;
};

struct PointContext {
  DiagramId id;
  bool lower = true;  // lower curve (min) vs upper (max)
  double abscissa = 0.0;
  const SweepOptions* opts = nullptr;
};

Sense point_sense(const PointContext& ctx) {
  return ctx.lower ? Sense::Minimize : Sense::Maximize;
}

// independent feasibility re-check through the functionals module; convexity
// is re-measured from the polygon itself so a solver cannot hand back a
// zigzag that slipped under its own scaled tolerances
double recheck_violation(const PointContext& ctx, const PolygonBody& poly) {
  const GeoSummary g = polygon_functionals(poly);
  double v = 0.0;
  switch (ctx.id) {
    case DiagramId::D1:
      v = std::max(std::abs(g.P - ctx.abscissa) / ctx.abscissa, std::abs(*g.d - 1.0));
      break;
    case DiagramId::D2:
      v = std::max(std::abs(g.P - ctx.abscissa) / ctx.abscissa, std::abs(g.A - 1.0));
      break;
    case DiagramId::D3:
      v = std::max(std::abs(*g.d - ctx.abscissa) / ctx.abscissa, std::abs(g.A - 1.0));
      break;
  }
  const int n = poly.count();
  const Vec2 c = polygon_centroid(poly.vertices);
  double rbar = 0.0;
  for (const Vec2& p : poly.vertices) rbar += dist(p, c);
  rbar /= n;
  for (int k = 0; k < n; ++k) {
    const Vec2& prev = poly.vertices[(k + n - 1) % n];
    const Vec2& cur = poly.vertices[k];
    const Vec2& next = poly.vertices[(k + 1) % n];
    const double r =
        (prev.x - cur.x) * (next.y - cur.y) - (prev.y - cur.y) * (next.x - cur.x);
    v = std::max(v, r / (rbar * rbar));
  }
  return v;
}

// support-phase variant: the smooth body's own functionals, not the ones of
// its polygonalization (those differ by the O(1/M^2) inscription defect)
double recheck_violation(const PointContext& ctx, const FourierBody& body) {
  const double P = kTwoPi * body.a[0];
  const double A = support_area(body);
  const double d = support_diameter(body);
  double v = 0.0;
  switch (ctx.id) {
    case DiagramId::D1:
      v = std::max(std::abs(P - ctx.abscissa) / ctx.abscissa, std::abs(d - 1.0));
      break;
    case DiagramId::D2:
      v = std::max(std::abs(P - ctx.abscissa) / ctx.abscissa, std::abs(A - 1.0));
      break;
    case DiagramId::D3:
      v = std::max(std::abs(d - ctx.abscissa) / ctx.abscissa, std::abs(A - 1.0));
      break;
  }
  v = std::max(v, -(body.min_curvature_residual() / std::abs(body.a[0])));
  return v;
}

// reported ordinate for an adopted polygon: area for D1, lambda of the
// area-normalized polygon otherwise (points live on the A = 1 slice)
double reported_value(const PointContext& ctx, const PolygonBody& poly, double coeff_area) {
  if (ctx.id == DiagramId::D1) return coeff_area;
  return lambda_of_body(normalize(poly, NormalizeTarget::Area), ctx.opts->fem_triangles_eval);
}

PhaseResult solve_support_phase(const PointContext& ctx, int N,
                                const std::vector<FourierBody>& starts) {
  const SweepOptions& so = *ctx.opts;
  const int n = 2 * N + 1;

  Problem prob;
  prob.n = n;
  prob.sense = point_sense(ctx);
  // equilibrate: coefficient k enters curvature rows with weight ~k^2
  prob.diag_scale.setOnes(n);
  for (int k = 1; k <= N; ++k)
    prob.diag_scale(k) = prob.diag_scale(N + k) = 1.0 / (1.0 + double(k) * k);
  prob.linear = support_convexity_rows(N, so.support_constraint_M);
  const double d0 = (ctx.id == DiagramId::D1) ? 1.0 : ctx.abscissa;
  if (ctx.id == DiagramId::D1 || ctx.id == DiagramId::D3)
    prob.linear.append(support_diameter_rows(N, so.support_constraint_M, d0));
  if (ctx.id == DiagramId::D1 || ctx.id == DiagramId::D2)
    prob.linear.append(support_perimeter_row(N, ctx.abscissa));

  if (ctx.id == DiagramId::D2 || ctx.id == DiagramId::D3) {
    NonlinearConstraint area;
    area.scale = 1.0;
    area.f = [](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
      const FourierBody b = FourierBody::from_coeffs(
          FourierKind::Support, std::vector<double>(x.data(), x.data() + x.size()));
      if (grad) *grad = grad_support_area(b);
      return support_area(b) - 1.0;
    };
    prob.eq.push_back(std::move(area));
  }

  std::shared_ptr<LambdaObjective> lam_obj;
  if (ctx.id == DiagramId::D1) {
    prob.objective = [](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
      const FourierBody b = FourierBody::from_coeffs(
          FourierKind::Support, std::vector<double>(x.data(), x.data() + x.size()));
      if (grad) *grad = grad_support_area(b);
      return support_area(b);
    };
    prob.objective_hessian = [N](const Eigen::VectorXd&, Eigen::MatrixXd& H) {
      H.setZero();
      H(0, 0) = kTwoPi;
      for (int k = 1; k <= N; ++k) {
        const double w = kPi * (1.0 - double(k) * k);
        H(k, k) = w;
        H(N + k, N + k) = w;
      }
    };
  } else {
    const int Mq = so.polygonalize_M;
    lam_obj = std::make_shared<LambdaObjective>(
        [Mq](const Eigen::VectorXd& x) {
          return polygon_from_support_raw(
              FourierBody::from_coeffs(FourierKind::Support,
                                       std::vector<double>(x.data(), x.data() + x.size())),
              Mq);
        },
        [Mq](const Eigen::VectorXd& x, const PolygonBody&, const BoundaryGradField& field) {
          const FourierBody b = FourierBody::from_coeffs(
              FourierKind::Support, std::vector<double>(x.data(), x.data() + x.size()));
          return grad_support_lambda1(b, field, Mq);
        },
        [](const Eigen::VectorXd& x, Eigen::VectorXd* gA) {
          const FourierBody b = FourierBody::from_coeffs(
              FourierKind::Support, std::vector<double>(x.data(), x.data() + x.size()));
          if (gA) *gA = grad_support_area(b);
          return support_area(b);
        },
        /*origin_from_centroid=*/true, so.fem_triangles_opt);
    prob.objective = [lam_obj](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
      return (*lam_obj)(x, g);
    };
  }

  // prepare starts: resize to order N, restore convexity feasibility, orient
  // the diameter to theta = 0, pin the scale
  std::vector<Eigen::VectorXd> x0s;
  for (FourierBody body : starts) {
    std::vector<double> a(N + 1, 0.0), b(N, 0.0);
    for (int k = 0; k <= std::min(N, body.N); ++k) a[k] = body.a[k];
    for (int k = 1; k <= std::min(N, body.N); ++k) b[k - 1] = body.b[k - 1];
    FourierBody f = smoothed_convex(FourierBody::support(a, b), so.support_constraint_M);
    if (ctx.id == DiagramId::D1 || ctx.id == DiagramId::D3) {
      f = f.rotated(-support_diameter_direction(f));
      const double d_now = support_diameter(f);
      if (d_now > 0.0) f = f.scaled(d0 / d_now);
    }
    if (ctx.id == DiagramId::D1 || ctx.id == DiagramId::D2) f.a[0] = ctx.abscissa / kTwoPi;
    Eigen::VectorXd x0(n);
    const std::vector<double> c = f.coeffs();
    for (int i = 0; i < n; ++i) x0(i) = c[i];
    x0s.push_back(std::move(x0));
  }

  if (so.max_starts > 0 && int(x0s.size()) > so.max_starts) x0s.resize(so.max_starts);

  // FEM gradients carry a few-percent noise floor; a 1e-6 stationarity target
  // is not meaningful for the lambda objectives
  SolveOptions sol = so.solver;
  if (ctx.id != DiagramId::D1) sol.tol_grad = std::max(sol.tol_grad, 2e-4);

  SolveResult best;
  bool have = false;
  const double sign = prob.sense == Sense::Maximize ? -1.0 : 1.0;
  for (int round = 0; round <= so.repin_rounds; ++round) {
    SolveResult r;
    try {
      r = multistart(prob, x0s, sol);
    } catch (const AllInfeasible&) {
      break;
    }
    if (!have || sign * r.objective < sign * best.objective || !best.feasible()) {
      best = r;
      have = true;
    }
    if (ctx.id == DiagramId::D2) break;
    // re-pin: if the active diameter direction migrated away from theta = 0,
    // rotate and re-solve so the pinned equality row matches it again. Ties
    // are fine: the pin only needs the extent at 0 to realize the maximum.
    const FourierBody body = FourierBody::from_coeffs(
        FourierKind::Support, std::vector<double>(r.x.data(), r.x.data() + r.x.size()));
    const double extent0 = body.eval(0.0) + body.eval(kPi);
    const double d_true = support_diameter(body);
    if (extent0 >= d_true * (1.0 - 1e-7)) break;
    const double drift = std::remainder(support_diameter_direction(body), kPi);
    const FourierBody rot = body.rotated(-drift);
    Eigen::VectorXd xr(n);
    const std::vector<double> c = rot.coeffs();
    for (int i = 0; i < n; ++i) xr(i) = c[i];
    x0s = {xr};
  }

  PhaseResult out;
  if (!have) return out;
  const FourierBody body = FourierBody::from_coeffs(
      FourierKind::Support, std::vector<double>(best.x.data(), best.x.data() + best.x.size()));
  try {
    out.poly = polygon_from_support_raw(body, so.polygonalize_M);
    out.violation = recheck_violation(ctx, body);
    out.value = reported_value(ctx, out.poly, support_area(body));
  } catch (const Error&) {
    return out;
  }
  out.iterations = best.iterations;
  out.support_body = body;
  out.body_json_text = body_json(body);
  out.ok = best.feasible(so.solver.infeasible_tol);
  return out;
}

PhaseResult solve_radial_phase(const PointContext& ctx, int M, const PolygonBody& seed) {
  const SweepOptions& so = *ctx.opts;
  const double d0 = (ctx.id == DiagramId::D1) ? 1.0 : ctx.abscissa;
  const bool with_diameter = ctx.id == DiagramId::D1 || ctx.id == DiagramId::D3;

  RadialBody rb = radial_from_polygon(seed, polygon_centroid(seed.vertices), M);

  // precompute the unit directions
  std::vector<double> cs(M), sn(M);
  for (int k = 0; k < M; ++k) {
    cs[k] = std::cos(kTwoPi * k / M);
    sn[k] = std::sin(kTwoPi * k / M);
  }
  const auto pair_dist2 = [&](const Eigen::VectorXd& r, int i, int j) {
    const double dx = r(i) * cs[i] - r(j) * cs[j];
    const double dy = r(i) * sn[i] - r(j) * sn[j];
    return dx * dx + dy * dy;
  };
  const auto max_pair = [&](const Eigen::VectorXd& r) {
    int bi = 0, bj = 1;
    double bd = 0.0;
    for (int i = 0; i < M; ++i)
      for (int j = i + 1; j < M; ++j) {
        const double d2 = pair_dist2(r, i, j);
        if (d2 > bd) {
          bd = d2;
          bi = i;
          bj = j;
        }
      }
    return std::tuple<int, int, double>(bi, bj, std::sqrt(bd));
  };

  Eigen::VectorXd x0(M);
  for (int k = 0; k < M; ++k) x0(k) = rb.rho[k];

  // the diameter constraint is a max over pairs; pin the active pair as a
  // smooth quadratic equality, keep every other pair capped, and re-pin if
  // the active pair migrates during optimization
  int pi = 0, pj = 1;
  if (with_diameter) {
    auto [bi, bj, bd] = max_pair(x0);
    pi = bi;
    pj = bj;
    x0 *= d0 / bd;  // make the pinned equality exact at the start
  }

  SolveResult best;
  bool have = false;
  const double sign = point_sense(ctx) == Sense::Maximize ? -1.0 : 1.0;

  for (int round = 0; round <= so.repin_rounds; ++round) {
    Problem prob;
    prob.n = M;
    prob.sense = point_sense(ctx);
    prob.lower = Eigen::VectorXd::Constant(M, 1e-2 * d0);

    if (with_diameter) {
      NonlinearConstraint pin;
      pin.scale = d0 * d0;
      pin.f = [&, pi, pj](const Eigen::VectorXd& r, Eigen::VectorXd* grad) {
        const double cc = cs[pi] * cs[pj] + sn[pi] * sn[pj];
        const double val = r(pi) * r(pi) + r(pj) * r(pj) - 2.0 * r(pi) * r(pj) * cc - d0 * d0;
        if (grad) {
          grad->setZero(r.size());
          (*grad)(pi) = 2.0 * r(pi) - 2.0 * r(pj) * cc;
          (*grad)(pj) = 2.0 * r(pj) - 2.0 * r(pi) * cc;
        }
        return val;
      };
      prob.eq.push_back(std::move(pin));

      for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j) {
          if (i == pi && j == pj) continue;
          const double cc = cs[i] * cs[j] + sn[i] * sn[j];
          // pairs at small angular separation cannot reach d0 for a convex
          // body containing the origin with radii below d0
          if (2.0 * d0 * d0 * (1.0 - cc) < 0.2 * d0 * d0) continue;
          NonlinearConstraint nc;
          nc.scale = d0 * d0;
          nc.f = [i, j, cc, d0](const Eigen::VectorXd& r, Eigen::VectorXd* grad) {
            const double ri = r(i), rj = r(j);
            const double val = ri * ri + rj * rj - 2.0 * ri * rj * cc - d0 * d0;
            if (grad) {
              grad->setZero(r.size());
              (*grad)(i) = 2.0 * ri - 2.0 * rj * cc;
              (*grad)(j) = 2.0 * rj - 2.0 * ri * cc;
            }
            return val;
          };
          prob.ineq.push_back(std::move(nc));
        }
    }

    // convexity residuals C_k normalized by the local rho_{k-1} rho_{k+1}
    // scale: C_k itself shrinks like rho^2, which would let tiny-radius
    // zigzags through any global tolerance
    for (int k = 0; k < M; ++k) {
      NonlinearConstraint nc;
      nc.scale = 1.0;
      const int km = (k + M - 1) % M, kp = (k + 1) % M;
      const double c2 = 2.0 * std::cos(kTwoPi / M);
      nc.f = [k, km, kp, c2](const Eigen::VectorXd& r, Eigen::VectorXd* grad) {
        const double rm = r(km), r0 = r(k), rp = r(kp);
        const double val = c2 - r0 * (1.0 / rm + 1.0 / rp);
        if (grad) {
          grad->setZero(r.size());
          (*grad)(km) = r0 / (rm * rm);
          (*grad)(k) = -(1.0 / rm + 1.0 / rp);
          (*grad)(kp) = r0 / (rp * rp);
        }
        return val;
      };
      prob.ineq.push_back(std::move(nc));
    }

    if (ctx.id == DiagramId::D1 || ctx.id == DiagramId::D2) {
      NonlinearConstraint per;
      per.scale = ctx.abscissa;
      per.f = [M, p0 = ctx.abscissa](const Eigen::VectorXd& r, Eigen::VectorXd* grad) {
        RadialBody b;
        b.rho.assign(r.data(), r.data() + M);
        if (grad) *grad = grad_radial_perimeter(b);
        return radial_functionals(b).P - p0;
      };
      prob.eq.push_back(std::move(per));
    }
    if (ctx.id == DiagramId::D2 || ctx.id == DiagramId::D3) {
      NonlinearConstraint area;
      area.scale = 1.0;
      area.f = [M](const Eigen::VectorXd& r, Eigen::VectorXd* grad) {
        RadialBody b;
        b.rho.assign(r.data(), r.data() + M);
        if (grad) *grad = grad_radial_area(b);
        double s = 0.0;
        for (int k = 0; k < M; ++k) s += r(k) * r((k + 1) % M);
        return 0.5 * std::sin(kTwoPi / M) * s - 1.0;
      };
      prob.eq.push_back(std::move(area));
    }

    std::shared_ptr<LambdaObjective> lam_obj;
    if (ctx.id == DiagramId::D1) {
      prob.objective = [M](const Eigen::VectorXd& r, Eigen::VectorXd* grad) {
        RadialBody b;
        b.rho.assign(r.data(), r.data() + M);
        if (grad) *grad = grad_radial_area(b);
        return radial_functionals(b).A;
      };
      prob.objective_hessian = [M](const Eigen::VectorXd&, Eigen::MatrixXd& H) {
        H.setZero();
        const double w = 0.5 * std::sin(kTwoPi / M);
        for (int k = 0; k < M; ++k) {
          H(k, (k + 1) % M) += w;
          H((k + 1) % M, k) += w;
        }
      };
    } else {
      lam_obj = std::make_shared<LambdaObjective>(
          [M](const Eigen::VectorXd& r) {
            RadialBody b;
            b.rho.assign(r.data(), r.data() + M);
            if (!b.all_positive()) throw DegenerateBody("radial objective: rho <= 0");
            return polygon_from_radial(b);
          },
          [M](const Eigen::VectorXd& r, const PolygonBody&, const BoundaryGradField& field) {
            RadialBody b;
            b.rho.assign(r.data(), r.data() + M);
            return grad_radial_lambda1(b, field);
          },
          [M](const Eigen::VectorXd& r, Eigen::VectorXd* gA) {
            RadialBody b;
            b.rho.assign(r.data(), r.data() + M);
            if (gA) *gA = grad_radial_area(b);
            return radial_functionals(b).A;
          },
          /*origin_from_centroid=*/false, so.fem_triangles_opt);
      prob.objective = [lam_obj](const Eigen::VectorXd& r, Eigen::VectorXd* g) {
        return (*lam_obj)(r, g);
      };
    }

    SolveOptions sol = so.solver;
    if (ctx.id != DiagramId::D1) sol.tol_grad = std::max(sol.tol_grad, 2e-4);
    SolveResult r = solve(prob, x0, sol);
    if (!have || sign * r.objective < sign * best.objective || !best.feasible()) {
      best = r;
      have = true;
    }
    if (!with_diameter) break;
    auto [bi, bj, bd] = max_pair(r.x);
    const bool pinned_is_max = (bi == pi && bj == pj) || bd <= d0 * (1.0 + 1e-9);
    if (pinned_is_max) break;
    pi = bi;
    pj = bj;
    x0 = r.x * (d0 / bd);
  }

  PhaseResult out;
  if (!have) return out;
  RadialBody rbody;
  rbody.rho.assign(best.x.data(), best.x.data() + M);
  if (!rbody.all_positive()) return out;
  out.poly = polygon_from_radial(rbody);
  out.violation = recheck_violation(ctx, out.poly);
  out.value = reported_value(ctx, out.poly, radial_functionals(rbody).A);
  out.iterations = best.iterations;
  out.body_json_text = body_json(rbody);
  out.ok = best.feasible(so.solver.infeasible_tol);
  return out;
}

PolygonBody resample_vertices(const PolygonBody& poly, int M) {
  // equal arc-length resampling along the polygon boundary
  const int n = poly.count();
  std::vector<double> cum(n + 1, 0.0);
  for (int i = 0; i < n; ++i)
    cum[i + 1] = cum[i] + dist(poly.vertices[i], poly.vertices[(i + 1) % n]);
  const double total = cum[n];
  PolygonBody out;
  out.vertices.resize(M);
  int seg = 0;
  for (int k = 0; k < M; ++k) {
    const double s = total * k / M;
    while (seg + 1 < n && cum[seg + 1] < s) ++seg;
    const double t = (s - cum[seg]) / std::max(cum[seg + 1] - cum[seg], 1e-300);
    out.vertices[k] =
        poly.vertices[seg] + (poly.vertices[(seg + 1) % n] - poly.vertices[seg]) * t;
  }
  return out;
}

PhaseResult solve_vertices_phase(const PointContext& ctx, int M, const PolygonBody& seed) {
  if (ctx.id != DiagramId::D2)
    throw Error("vertices phase: implemented for the d2 sweep (polygonal lower boundary)");
  const SweepOptions& so = *ctx.opts;
  const PolygonBody start_poly = resample_vertices(seed, M);

  Problem prob;
  prob.n = 2 * M;
  prob.sense = point_sense(ctx);

  const QuadResidualSet conv = polygon_convexity(M);
  const double cscale = std::pow(ctx.abscissa / M, 2.0);
  for (int k = 0; k < M; ++k) {
    NonlinearConstraint nc;
    nc.scale = cscale;
    nc.f = [conv, k](const Eigen::VectorXd& v, Eigen::VectorXd* grad) {
      if (grad) {
        grad->setZero(v.size());
        conv.gradient(v, k, *grad);
      }
      return conv.value(v, k);
    };
    prob.ineq.push_back(std::move(nc));
  }

  const auto poly_of = [M](const Eigen::VectorXd& v) {
    PolygonBody p;
    p.vertices.resize(M);
    for (int k = 0; k < M; ++k) p.vertices[k] = {v(2 * k), v(2 * k + 1)};
    return p;
  };

  NonlinearConstraint per;
  per.scale = ctx.abscissa;
  per.f = [poly_of, p0 = ctx.abscissa](const Eigen::VectorXd& v, Eigen::VectorXd* grad) {
    const PolygonBody p = poly_of(v);
    if (grad) *grad = grad_vertices_perimeter(p);
    double P = 0.0;
    for (int i = 0; i < p.count(); ++i)
      P += dist(p.vertices[i], p.vertices[(i + 1) % p.count()]);
    return P - p0;
  };
  prob.eq.push_back(std::move(per));

  NonlinearConstraint area;
  area.scale = 1.0;
  area.f = [poly_of](const Eigen::VectorXd& v, Eigen::VectorXd* grad) {
    const PolygonBody p = poly_of(v);
    if (grad) *grad = grad_vertices_area(p);
    return polygon_signed_area(p.vertices) - 1.0;
  };
  prob.eq.push_back(std::move(area));

  // grad_vertices_lambda1 needs the mesh and eig pair, not just the boundary
  // field, so this objective is built directly instead of via LambdaObjective
  const TriMesh& ref = disk_reference_mesh(so.fem_triangles_opt);
  auto cache = std::make_shared<std::unordered_map<std::uint64_t, std::pair<double, Eigen::VectorXd>>>();
  auto cache_mu = std::make_shared<std::mutex>();
  auto last_u = std::make_shared<Eigen::VectorXd>();
  prob.objective = [poly_of, &ref, cache, cache_mu, last_u](const Eigen::VectorXd& v,
                                                            Eigen::VectorXd* grad) {
    const std::uint64_t key = hash_vec(v);
    Eigen::VectorXd ustart;
    {
      std::lock_guard<std::mutex> lock(*cache_mu);
      const auto it = cache->find(key);
      if (it != cache->end()) {
        if (grad) *grad = it->second.second;
        return it->second.first;
      }
      ustart = *last_u;
    }
    PolygonBody p = poly_of(v);
    const double A = polygon_signed_area(p.vertices);
    if (!(A > 0.0)) throw DegeneratePolygon("vertices objective: flipped polygon");
    const Vec2 origin = polygon_centroid(p.vertices);
    const TriMesh mesh = mesh_mapped(p, origin, ref);
    const EigResult eig = lambda1(mesh, ustart.size() ? &ustart : nullptr);
    const double f = eig.lambda1 * A;
    Eigen::VectorXd g =
        A * grad_vertices_lambda1(p, mesh, eig, origin) + eig.lambda1 * grad_vertices_area(p);
    {
      std::lock_guard<std::mutex> lock(*cache_mu);
      *last_u = eig.u;
      if (cache->size() > 64) cache->clear();
      (*cache)[key] = {f, g};
    }
    if (grad) *grad = std::move(g);
    return f;
  };

  Eigen::VectorXd x0(2 * M);
  for (int k = 0; k < M; ++k) {
    x0(2 * k) = start_poly.vertices[k].x;
    x0(2 * k + 1) = start_poly.vertices[k].y;
  }

  SolveOptions sol = so.solver;
  sol.tol_grad = std::max(sol.tol_grad, 2e-4);
  const SolveResult r = solve(prob, x0, sol);

  PhaseResult out;
  PolygonBody poly = poly_of(r.x);
  if (!(polygon_signed_area(poly.vertices) > 0.0)) return out;
  out.poly = poly;
  out.violation = recheck_violation(ctx, poly);
  out.value = reported_value(ctx, poly, polygon_signed_area(poly.vertices));
  out.iterations = r.iterations;
  out.body_json_text = body_json(poly);
  out.ok = r.feasible(so.solver.infeasible_tol);
  return out;
}

std::vector<PhaseSpec> default_phases(DiagramId id, bool lower) {
  switch (id) {
    case DiagramId::D1:
      return lower ? std::vector<PhaseSpec>{{PhaseSpec::Kind::Support, 80},
                                            {PhaseSpec::Kind::Radial, 200}}
                   : std::vector<PhaseSpec>{{PhaseSpec::Kind::Support, 80}};
    case DiagramId::D2:
      return lower ? std::vector<PhaseSpec>{{PhaseSpec::Kind::Support, 80},
                                            {PhaseSpec::Kind::Vertices, 32}}
                   : std::vector<PhaseSpec>{{PhaseSpec::Kind::Support, 80}};
    case DiagramId::D3:
      return {{PhaseSpec::Kind::Support, 80}};
  }
  return {};
}

// Fit a seed body from a polygon: corners are rounded at the scale the
// truncation can resolve first, otherwise the fit rings (Gibbs) far below the
// convexity rows and the smoothing needed to repair it destroys the shape.
FourierBody fit_seed_support(const PolygonBody& p, int N) {
  const double d = brute_force_diameter(p);
  const PolygonBody rounded = rounded_polygon(p, 3.0 * d / std::max(N, 8));
  return fit_support_from_polygon(rounded, N).body;
}

// initial seed bodies (first grid point or cold start)
std::vector<FourierBody> seed_supports(const PointContext& ctx, int N) {
  std::vector<FourierBody> seeds;
  const auto fit = [&](const PolygonBody& p) { seeds.push_back(fit_seed_support(p, N)); };
  switch (ctx.id) {
    case DiagramId::D1:
      if (ctx.lower)
        fit(subequilateral_triangle(std::min(ctx.abscissa, 3.0)));
      else
        fit(lens_body(std::min(ctx.abscissa, kPi)));
      break;
    case DiagramId::D2:
      seeds.push_back(FourierBody::disk(1.0 / std::sqrt(kPi), N));
      break;
    case DiagramId::D3: {
      const double d0 = ctx.abscissa;
      if (ctx.lower) {
        fit(d3_family_at_diameter(D3Family::TwoCap, d0));
      } else {
        fit(d3_family_at_diameter(D3Family::Slice, d0));
        // second start: scaled regular nonagon (the non-slice regime)
        PolygonBody nona = normalize(regular_polygon(9, 1.0), NormalizeTarget::Area);
        fit(nona);
      }
      break;
    }
  }
  return seeds;
}

}  // namespace

namespace {

PolygonBody seed_polygon_direct(const PointContext& ctx) {
  switch (ctx.id) {
    case DiagramId::D1:
      return ctx.lower ? subequilateral_triangle(std::min(ctx.abscissa, 3.0))
                       : lens_body(std::min(ctx.abscissa, kPi));
    case DiagramId::D2:
      return regular_polygon(96, 1.0 / std::sqrt(kPi));
    case DiagramId::D3:
      return d3_family_at_diameter(ctx.lower ? D3Family::TwoCap : D3Family::Slice,
                                   ctx.abscissa);
  }
  throw Error("seed_polygon_direct: unreachable");
}

const char* phase_name(PhaseSpec::Kind k) {
  switch (k) {
    case PhaseSpec::Kind::Support: return "support";
    case PhaseSpec::Kind::Radial: return "radial";
    case PhaseSpec::Kind::Vertices: return "vertices";
  }
  return "?";
}

}  // namespace

DiagramBoundary sweep(DiagramId id, const std::vector<double>& grid, const SweepOptions& opts) {
  if (grid.empty()) throw Error("sweep: empty grid");
  DiagramBoundary out;
  out.id = id;
  out.grid = grid;
  out.lower.resize(grid.size());
  out.upper.resize(grid.size());

  int failures = 0, attempted = 0;

  for (int curve = 0; curve < 2; ++curve) {
    const bool lower = curve == 0;
    if (lower && opts.upper_only) continue;
    if (!lower && opts.lower_only) continue;
    const std::vector<PhaseSpec> phases =
        (lower ? opts.phases_lower : opts.phases_upper).empty()
            ? default_phases(id, lower)
            : (lower ? opts.phases_lower : opts.phases_upper);

    std::optional<FourierBody> warm_support;  // carried between grid points
    std::optional<PolygonBody> warm_poly;

    for (size_t gi = 0; gi < grid.size(); ++gi) {
      const PointContext ctx{id, lower, grid[gi], &opts};
      BoundaryPointRecord& rec = lower ? out.lower[gi] : out.upper[gi];
      ++attempted;

      const auto better = [&](double candidate, double incumbent) {
        return lower ? candidate < incumbent : candidate > incumbent;
      };

      std::optional<PolygonBody> chain_poly;  // hand-off between phases
      std::optional<FourierBody> point_support;

      for (const PhaseSpec& ph : phases) {
        PhaseResult pr;
        try {
          switch (ph.kind) {
            case PhaseSpec::Kind::Support: {
              std::vector<FourierBody> starts;
              if (opts.warm_start && warm_support) starts.push_back(*warm_support);
              else if (opts.warm_start && warm_poly)
                starts.push_back(fit_seed_support(*warm_poly, ph.size));
              // D3 always adds the candidate-family starts (the upper boundary
              // switches regime and warm starting alone tracks one branch)
              if (id == DiagramId::D3 || starts.empty())
                for (auto& s : seed_supports(ctx, ph.size)) starts.push_back(std::move(s));
              pr = solve_support_phase(ctx, ph.size, starts);
              break;
            }
            case PhaseSpec::Kind::Radial: {
              PolygonBody seed = chain_poly ? *chain_poly
                                 : warm_poly ? *warm_poly
                                             : seed_polygon_direct(ctx);
              pr = solve_radial_phase(ctx, ph.size, seed);
              break;
            }
            case PhaseSpec::Kind::Vertices: {
              PolygonBody seed = chain_poly ? *chain_poly
                                 : warm_poly ? *warm_poly
                                             : seed_polygon_direct(ctx);
              pr = solve_vertices_phase(ctx, ph.size, seed);
              break;
            }
          }
        } catch (const Error&) {
          pr = PhaseResult{};
        }
        rec.phase_values.emplace_back(phase_name(ph.kind), pr.value);
        if (pr.ok && pr.violation <= opts.solver.infeasible_tol &&
            (!rec.ok || better(pr.value, rec.value))) {
          rec.ok = true;
          rec.value = pr.value;
          rec.body_json = pr.body_json_text;
          rec.phase = phase_name(ph.kind);
          rec.iterations = pr.iterations;
          rec.violation = pr.violation;
          chain_poly = pr.poly;
          if (pr.support_body) point_support = pr.support_body;
        }
      }

      if (rec.ok) {
        warm_poly = chain_poly;
        if (point_support) warm_support = point_support;
      } else {
        ++failures;
      }
    }
  }

  if (failures > opts.gap_fraction * attempted)
    throw SweepGapExceeded("sweep: too many failed grid points", out);
  return out;
}

std::vector<Vec2> fill_region(const DiagramBoundary& b) {
  const size_t n = b.grid.size();
  if (n == 0) throw GapInBoundary("fill_region: empty boundary");
  std::vector<Vec2> region;
  for (size_t i = 0; i < n; ++i) {
    if (!b.lower[i].ok || !b.upper[i].ok) throw GapInBoundary("fill_region: gap in curves");
    if (b.lower[i].value > b.upper[i].value + 1e-9)
      throw GapInBoundary("fill_region: curves cross");
  }
  for (size_t i = 0; i < n; ++i) region.push_back({b.grid[i], b.lower[i].value});
  for (size_t i = n; i-- > 0;) region.push_back({b.grid[i], b.upper[i].value});
  return region;
}

std::string boundary_csv(const DiagramBoundary& b) {
  std::string out = "x,lower,upper,lower_status,upper_status\n";
  char buf[192];
  for (size_t i = 0; i < b.grid.size(); ++i) {
    const auto fmt_val = [](const BoundaryPointRecord& r) {
      char v[48];
      if (r.ok)
        std::snprintf(v, sizeof v, "%.12g", r.value);
      else
        v[0] = '\0';
      return std::string(v);
    };
    std::snprintf(buf, sizeof buf, "%.12g,%s,%s,%s,%s\n", b.grid[i],
                  fmt_val(b.lower[i]).c_str(), fmt_val(b.upper[i]).c_str(),
                  b.lower[i].ok ? "ok" : "fail", b.upper[i].ok ? "ok" : "fail");
    out += buf;
  }
  return out;
}

}  // namespace shapeopt
