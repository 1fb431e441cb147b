#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "shapeopt/derivatives.hpp"
#include "shapeopt/diagram.hpp"
#include "shapeopt/errors.hpp"
#include "shapeopt/functionals.hpp"
#include "shapeopt/json_io.hpp"
#include "shapeopt/spectral.hpp"
#include "shapeopt/svg.hpp"

namespace fs = std::filesystem;
using namespace shapeopt;

namespace {

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string summary_csv(const GeoSummary& g) {
  std::string out = fmt12(g.P) + "," + fmt12(g.A) + ",";
  if (g.d) out += fmt12(*g.d);
  out += ",";
  if (g.w) out += fmt12(*g.w);
  out += ",";
  if (g.lambda1) out += fmt12(*g.lambda1);
  return out;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  os << content;
}

DiagramId parse_diagram(const std::string& s) {
  if (s == "d1") return DiagramId::D1;
  if (s == "d2") return DiagramId::D2;
  if (s == "d3") return DiagramId::D3;
  throw ParseError("unknown diagram \"" + s + "\" (expected d1, d2 or d3)");
}

std::vector<double> parse_grid(const std::string& s) {
  // "a:b:n" -> n uniform points on [a,b]
  double a, b;
  int n;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1 || !(b >= a))
    throw ParseError("bad --grid, expected a:b:n");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return g;
}

std::vector<PhaseSpec> parse_phases(const std::string& s) {
  std::vector<PhaseSpec> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    const std::string name = item.substr(0, colon);
    const int size = colon == std::string::npos ? 0 : std::atoi(item.c_str() + colon + 1);
    PhaseSpec ph;
    if (name == "support") ph = {PhaseSpec::Kind::Support, size > 0 ? size : 80};
    else if (name == "radial") ph = {PhaseSpec::Kind::Radial, size > 0 ? size : 200};
    else if (name == "vertices") ph = {PhaseSpec::Kind::Vertices, size > 0 ? size : 32};
    else throw ParseError("unknown phase \"" + name + "\"");
    out.push_back(ph);
  }
  if (out.empty()) throw ParseError("empty --phases");
  return out;
}

// ---- config file ------------------------------------------------------------

struct RunConfig {
  std::string diagram = "d1";
  std::string grid;
  std::string phases, phases_upper;
  std::uint64_t seed = 1;
  std::string out = "out";
  int cloud = 0;
  int n = 0;
  int min_sides = 3, max_sides = 30;
  bool spectral = false;
  double tol_feas = 1e-7, tol_grad = 1e-6;
  int max_iter = 4000, starts = 0;
  int fem_opt = 4000, fem_eval = 20000, fem_cloud = 4000;
};

void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot read config " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  const auto known = {"diagram", "grid",  "phases", "phases_upper", "seed",
                      "out",     "cloud", "n",      "sides",        "spectral",
                      "solver",  "fem"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ParseError("config: unknown key \"" + key + "\"");
  }
  if (j.contains("diagram")) cfg.diagram = j["diagram"].get<std::string>();
  if (j.contains("grid")) cfg.grid = j["grid"].get<std::string>();
  if (j.contains("phases")) cfg.phases = j["phases"].get<std::string>();
  if (j.contains("phases_upper")) cfg.phases_upper = j["phases_upper"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("cloud")) cfg.cloud = j["cloud"].get<int>();
  if (j.contains("n")) cfg.n = j["n"].get<int>();
  if (j.contains("spectral")) cfg.spectral = j["spectral"].get<bool>();
  if (j.contains("sides")) {
    cfg.min_sides = j["sides"].at(0).get<int>();
    cfg.max_sides = j["sides"].at(1).get<int>();
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    for (const auto& [key, _] : s.items())
      if (key != "tol_feas" && key != "tol_grad" && key != "max_iter" && key != "starts")
        throw ParseError("config: unknown solver key \"" + key + "\"");
    if (s.contains("tol_feas")) cfg.tol_feas = s["tol_feas"].get<double>();
    if (s.contains("tol_grad")) cfg.tol_grad = s["tol_grad"].get<double>();
    if (s.contains("max_iter")) cfg.max_iter = s["max_iter"].get<int>();
    if (s.contains("starts")) cfg.starts = s["starts"].get<int>();
  }
  if (j.contains("fem")) {
    const auto& f = j["fem"];
    for (const auto& [key, _] : f.items())
      if (key != "opt" && key != "eval" && key != "cloud")
        throw ParseError("config: unknown fem key \"" + key + "\"");
    if (f.contains("opt")) cfg.fem_opt = f["opt"].get<int>();
    if (f.contains("eval")) cfg.fem_eval = f["eval"].get<int>();
    if (f.contains("cloud")) cfg.fem_cloud = f["cloud"].get<int>();
  }
}

// ---- eval ---------------------------------------------------------------------

int cmd_eval(const std::string& file, bool spectral, int fem_triangles) {
  std::ifstream is(file);
  if (!is) {
    std::cerr << "eval: cannot read " << file << "\n";
    return 2;
  }
  std::stringstream ss;
  ss << is.rdbuf();
  const ParsedBody body = parse_body(ss.str());

  GeoSummary g;
  PolygonBody poly;
  if (body.fourier && body.kind == "support") {
    g = support_functionals(*body.fourier);
    if (spectral) poly = polygon_from_support(*body.fourier);
  } else if (body.fourier) {
    g = gauge_functionals(*body.fourier);
    if (spectral) poly = polygon_from_gauge(*body.fourier);
  } else if (body.polygon) {
    g = polygon_functionals(*body.polygon);
    if (spectral) poly = *body.polygon;
  } else {
    g = radial_functionals(*body.radial);
    if (spectral) poly = polygon_from_radial(*body.radial);
  }
  if (spectral) g.lambda1 = lambda1_of_polygon(poly, fem_triangles).lambda1;
  std::cout << summary_csv(g) << "\n";
  return 0;
}

// ---- cloud ----------------------------------------------------------------------

int cmd_cloud(const RunConfig& cfg, bool make_svg) {
  if (cfg.n < 1) {
    std::cerr << "cloud: --n must be >= 1\n";
    return 2;
  }
  const DiagramId id = parse_diagram(cfg.diagram);
  CloudOptions copts;
  copts.min_sides = cfg.min_sides;
  copts.max_sides = cfg.max_sides;
  copts.fem_triangles = cfg.fem_cloud;
  const DiagramCloud cloud = random_cloud(id, cfg.n, cfg.seed, copts);

  fs::create_directories(cfg.out);
  write_file(fs::path(cfg.out) / (diagram_name(id) + "_cloud.csv"), cloud_csv(cloud));

  if (make_svg) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    std::vector<Vec2> pts;
    for (const auto& p : cloud.points) {
      pts.push_back({p.x, p.y});
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double px = 0.05 * (xmax - xmin + 1e-9), py = 0.05 * (ymax - ymin + 1e-9);
    SvgPlot plot(xmin - px, xmax + px, ymin - py, ymax + py);
    plot.axes(id == DiagramId::D3 ? "d" : "P", id == DiagramId::D1 ? "A" : "lambda1");
    plot.markers(pts, 1.4, "#1f77b4");
    std::ostringstream os;
    plot.write(os);
    write_file(fs::path(cfg.out) / (diagram_name(id) + "_cloud.svg"), os.str());
  }
  std::cout << "cloud: " << cloud.points.size() << " points -> " << cfg.out << "\n";
  return 0;
}

// ---- sweep ----------------------------------------------------------------------

void write_sweep_outputs(const RunConfig& cfg, DiagramId id, const DiagramBoundary& b,
                         const DiagramCloud* cloud) {
  fs::create_directories(cfg.out);
  write_file(fs::path(cfg.out) / (diagram_name(id) + "_boundary.csv"), boundary_csv(b));
  for (size_t i = 0; i < b.grid.size(); ++i) {
    char name[64];
    if (b.lower[i].ok) {
      std::snprintf(name, sizeof name, "%s_lower_%03zu.json", diagram_name(id).c_str(), i);
      write_file(fs::path(cfg.out) / name, b.lower[i].body_json);
    }
    if (b.upper[i].ok) {
      std::snprintf(name, sizeof name, "%s_upper_%03zu.json", diagram_name(id).c_str(), i);
      write_file(fs::path(cfg.out) / name, b.upper[i].body_json);
    }
  }

  // svg with region, curves and optional cloud
  bool complete = true;
  for (size_t i = 0; i < b.grid.size(); ++i)
    complete = complete && b.lower[i].ok && b.upper[i].ok;
  double ymin = 1e300, ymax = -1e300;
  std::vector<Vec2> lo, up;
  for (size_t i = 0; i < b.grid.size(); ++i) {
    if (b.lower[i].ok) {
      lo.push_back({b.grid[i], b.lower[i].value});
      ymin = std::min(ymin, b.lower[i].value);
      ymax = std::max(ymax, b.lower[i].value);
    }
    if (b.upper[i].ok) {
      up.push_back({b.grid[i], b.upper[i].value});
      ymin = std::min(ymin, b.upper[i].value);
      ymax = std::max(ymax, b.upper[i].value);
    }
  }
  if (cloud)
    for (const auto& p : cloud->points) {
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  if (lo.empty() && up.empty()) return;
  const double xpad = 0.05 * (b.grid.back() - b.grid.front() + 1e-9);
  const double ypad = 0.05 * (ymax - ymin + 1e-9);
  SvgPlot plot(b.grid.front() - xpad, b.grid.back() + xpad, ymin - ypad, ymax + ypad);
  plot.axes(id == DiagramId::D3 ? "d" : "P", id == DiagramId::D1 ? "A" : "lambda1");
  if (complete) plot.filled_polygon(fill_region(b), "#9ecae1", 0.5);
  if (cloud) {
    std::vector<Vec2> pts;
    for (const auto& p : cloud->points) pts.push_back({p.x, p.y});
    plot.markers(pts, 1.2, "#555555");
  }
  plot.polyline(lo, "#d62728", 1.8);
  plot.polyline(up, "#2ca02c", 1.8);
  std::ostringstream os;
  plot.write(os);
  write_file(fs::path(cfg.out) / (diagram_name(id) + "_sweep.svg"), os.str());
}

int cmd_sweep(const RunConfig& cfg) {
  const DiagramId id = parse_diagram(cfg.diagram);
  const std::vector<double> grid = cfg.grid.empty() ? default_grid(id) : parse_grid(cfg.grid);
  if (grid.empty()) {
    std::cerr << "sweep: empty grid\n";
    return 2;
  }
  SweepOptions opts;
  if (!cfg.phases.empty()) opts.phases_lower = parse_phases(cfg.phases);
  if (!cfg.phases_upper.empty()) opts.phases_upper = parse_phases(cfg.phases_upper);
  else if (!cfg.phases.empty()) opts.phases_upper = opts.phases_lower;
  opts.solver.tol_feas = cfg.tol_feas;
  opts.solver.tol_grad = cfg.tol_grad;
  opts.solver.max_iter = cfg.max_iter;
  opts.max_starts = cfg.starts;
  opts.fem_triangles_opt = cfg.fem_opt;
  opts.fem_triangles_eval = cfg.fem_eval;

  std::optional<DiagramCloud> cloud;
  if (cfg.cloud > 0) {
    CloudOptions copts;
    copts.fem_triangles = cfg.fem_cloud;
    cloud = random_cloud(id, cfg.cloud, cfg.seed, copts);
    fs::create_directories(cfg.out);
    write_file(fs::path(cfg.out) / (diagram_name(id) + "_cloud.csv"), cloud_csv(*cloud));
  }

  try {
    const DiagramBoundary b = sweep(id, grid, opts);
    write_sweep_outputs(cfg, id, b, cloud ? &*cloud : nullptr);
  } catch (const SweepGapExceeded& e) {
    write_sweep_outputs(cfg, id, e.partial, cloud ? &*cloud : nullptr);
    std::cerr << "sweep: " << e.what() << " (partial results written)\n";
    return 3;
  }
  std::cout << "sweep: " << grid.size() << " grid points -> " << cfg.out << "\n";
  return 0;
}

// ---- gradcheck -----------------------------------------------------------------

struct CheckReport {
  int failures = 0;
  void line(const std::string& name, double err, double tol) {
    const bool ok = err <= tol;
    if (!ok) ++failures;
    std::printf("%s %-44s max rel err %.3e (tol %.1e)\n", ok ? "PASS" : "FAIL", name.c_str(),
                err, tol);
  }
};

double vec_rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double denom = std::max({a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>(), 1e-12});
  return (a - b).lpNorm<Eigen::Infinity>() / denom;
}

template <typename F>
Eigen::VectorXd central_fd(F&& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (int i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const double fp = f(xp);
    xp(i) = x(i) - h;
    const double fm = f(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

int cmd_gradcheck(std::uint64_t seed, int bodies, int fem_triangles) {
  CheckReport rep;
  const double fd_tol = 1e-7, lam_tol = 5e-2, diam_tol = 1e-4;

  // A and P analytic gradients vs central differences, all four parametrizations
  double worst_support = 0, worst_gauge = 0, worst_poly = 0, worst_radial = 0;
  for (int r = 0; r < bodies; ++r) {
    const FourierBody sb = random_fourier_body(seed + r, 8);
    const Eigen::VectorXd x = to_vec(sb.coeffs());
    const auto area_of = [](const Eigen::VectorXd& c) {
      return support_area(FourierBody::from_coeffs(
          FourierKind::Support, std::vector<double>(c.data(), c.data() + c.size())));
    };
    worst_support = std::max(
        worst_support, vec_rel_err(grad_support_area(sb), central_fd(area_of, x, 1e-6)));
    const auto per_of = [](const Eigen::VectorXd& c) { return kTwoPi * c(0); };
    worst_support = std::max(
        worst_support, vec_rel_err(grad_support_perimeter(sb), central_fd(per_of, x, 1e-6)));

    const FourierBody gb = random_fourier_body(seed + 1000 + r, 8, FourierKind::Gauge);
    const Eigen::VectorXd xg = to_vec(gb.coeffs());
    const auto g_area = [](const Eigen::VectorXd& c) {
      return gauge_functionals(
                 FourierBody::from_coeffs(FourierKind::Gauge,
                                          std::vector<double>(c.data(), c.data() + c.size())))
          .A;
    };
    const auto g_per = [](const Eigen::VectorXd& c) {
      return gauge_functionals(
                 FourierBody::from_coeffs(FourierKind::Gauge,
                                          std::vector<double>(c.data(), c.data() + c.size())))
          .P;
    };
    worst_gauge =
        std::max(worst_gauge, vec_rel_err(grad_gauge_area(gb), central_fd(g_area, xg, 1e-6)));
    worst_gauge =
        std::max(worst_gauge, vec_rel_err(grad_gauge_perimeter(gb), central_fd(g_per, xg, 1e-6)));

    const PolygonBody poly = cloud_polygon(DiagramId::D1, seed + 2000 + r);
    Eigen::VectorXd xv(2 * poly.count());
    for (int k = 0; k < poly.count(); ++k) {
      xv(2 * k) = poly.vertices[k].x;
      xv(2 * k + 1) = poly.vertices[k].y;
    }
    const int M = poly.count();
    const auto poly_of = [M](const Eigen::VectorXd& v) {
      PolygonBody p;
      p.vertices.resize(M);
      for (int k = 0; k < M; ++k) p.vertices[k] = {v(2 * k), v(2 * k + 1)};
      return p;
    };
    const auto p_area = [&](const Eigen::VectorXd& v) {
      return polygon_signed_area(poly_of(v).vertices);
    };
    const auto p_per = [&](const Eigen::VectorXd& v) { return polygon_functionals(poly_of(v)).P; };
    worst_poly =
        std::max(worst_poly, vec_rel_err(grad_vertices_area(poly), central_fd(p_area, xv, 1e-6)));
    worst_poly = std::max(
        worst_poly, vec_rel_err(grad_vertices_perimeter(poly), central_fd(p_per, xv, 1e-6)));

    const RadialBody rb = radial_from_polygon(poly, polygon_centroid(poly.vertices), 48);
    const Eigen::VectorXd xr = to_vec(rb.rho);
    const auto r_area = [](const Eigen::VectorXd& v) {
      RadialBody b;
      b.rho.assign(v.data(), v.data() + v.size());
      return radial_functionals(b).A;
    };
    const auto r_per = [](const Eigen::VectorXd& v) {
      RadialBody b;
      b.rho.assign(v.data(), v.data() + v.size());
      return radial_functionals(b).P;
    };
    worst_radial =
        std::max(worst_radial, vec_rel_err(grad_radial_area(rb), central_fd(r_area, xr, 1e-6)));
    worst_radial = std::max(
        worst_radial, vec_rel_err(grad_radial_perimeter(rb), central_fd(r_per, xr, 1e-6)));
  }
  rep.line("A,P gradients: support coefficients", worst_support, fd_tol);
  rep.line("A,P gradients: gauge coefficients", worst_gauge, fd_tol);
  rep.line("A,P gradients: polygon vertices", worst_poly, fd_tol);
  rep.line("A,P gradients: radial distances", worst_radial, fd_tol);

  // lambda1 Hadamard gradients vs FD on the smooth mapped-mesh pipeline
  const TriMesh& ref = disk_reference_mesh(fem_triangles);
  const auto lam_support = [&](const Eigen::VectorXd& c) {
    const FourierBody b = FourierBody::from_coeffs(
        FourierKind::Support, std::vector<double>(c.data(), c.data() + c.size()));
    const PolygonBody p = polygon_from_support(b);
    const Vec2 o = polygon_centroid(p.vertices);
    return lambda1(mesh_mapped(p, o, ref)).lambda1;
  };
  double worst_lam = 0.0;
  for (int r = 0; r < 2; ++r) {
    const FourierBody b = random_fourier_body(seed + 3000 + r, 6);
    const PolygonBody p = polygon_from_support(b);
    const Vec2 o = polygon_centroid(p.vertices);
    const TriMesh mesh = mesh_mapped(p, o, ref);
    const EigResult eig = lambda1(mesh);
    const BoundaryGradField field(mesh, eig, o);
    const Eigen::VectorXd an = grad_support_lambda1(b, field);
    const Eigen::VectorXd x = to_vec(b.coeffs());
    // directional check along the analytic gradient, plus dominant coordinates
    Eigen::VectorXd dir = an.normalized();
    const double t = 1e-4;
    const double fd_dir = (lam_support(x + t * dir) - lam_support(x - t * dir)) / (2.0 * t);
    worst_lam = std::max(worst_lam, std::abs(fd_dir - an.dot(dir)) /
                                        std::max(std::abs(fd_dir), 1e-8));
    std::vector<int> idx(an.size());
    for (int i = 0; i < an.size(); ++i) idx[i] = i;
    std::partial_sort(idx.begin(), idx.begin() + 3, idx.end(),
                      [&](int i, int j) { return std::abs(an(i)) > std::abs(an(j)); });
    for (int q = 0; q < 3; ++q) {
      Eigen::VectorXd xp = x, xm = x;
      xp(idx[q]) += t;
      xm(idx[q]) -= t;
      const double fd = (lam_support(xp) - lam_support(xm)) / (2.0 * t);
      worst_lam =
          std::max(worst_lam, std::abs(fd - an(idx[q])) / std::max(std::abs(fd), 1e-8));
    }
  }
  rep.line("lambda1 gradient: support (Hadamard vs FD)", worst_lam, lam_tol);

  const auto lam_gauge = [&](const Eigen::VectorXd& c) {
    const FourierBody b = FourierBody::from_coeffs(
        FourierKind::Gauge, std::vector<double>(c.data(), c.data() + c.size()));
    return lambda1(mesh_mapped(polygon_from_gauge(b), {0, 0}, ref)).lambda1;
  };
  double worst_lam_g = 0.0;
  for (int r = 0; r < 2; ++r) {
    const FourierBody b = random_fourier_body(seed + 4000 + r, 6, FourierKind::Gauge);
    const PolygonBody p = polygon_from_gauge(b);
    const TriMesh mesh = mesh_mapped(p, {0, 0}, ref);
    const EigResult eig = lambda1(mesh);
    const BoundaryGradField field(mesh, eig, {0, 0});
    const Eigen::VectorXd an = grad_gauge_lambda1(b, field);
    const Eigen::VectorXd x = to_vec(b.coeffs());
    Eigen::VectorXd dir = an.normalized();
    const double t = 1e-4;
    const double fd_dir = (lam_gauge(x + t * dir) - lam_gauge(x - t * dir)) / (2.0 * t);
    worst_lam_g = std::max(worst_lam_g, std::abs(fd_dir - an.dot(dir)) /
                                            std::max(std::abs(fd_dir), 1e-8));
  }
  rep.line("lambda1 gradient: gauge (Hadamard vs FD)", worst_lam_g, lam_tol);

  double worst_lam_r = 0.0;
  const auto lam_radial = [&](const Eigen::VectorXd& v) {
    RadialBody b;
    b.rho.assign(v.data(), v.data() + v.size());
    return lambda1(mesh_mapped(polygon_from_radial(b), {0, 0}, ref)).lambda1;
  };
  for (int r = 0; r < 2; ++r) {
    const PolygonBody hull = cloud_polygon(DiagramId::D2, seed + 5000 + r);
    const RadialBody b = radial_from_polygon(hull, polygon_centroid(hull.vertices), 64);
    const PolygonBody p = polygon_from_radial(b);
    const TriMesh mesh = mesh_mapped(p, {0, 0}, ref);
    const EigResult eig = lambda1(mesh);
    const BoundaryGradField field(mesh, eig, {0, 0});
    const Eigen::VectorXd an = grad_radial_lambda1(b, field);
    const Eigen::VectorXd x = to_vec(b.rho);
    Eigen::VectorXd dir = an.normalized();
    const double t = 1e-4;
    const double fd_dir = (lam_radial(x + t * dir) - lam_radial(x - t * dir)) / (2.0 * t);
    worst_lam_r = std::max(worst_lam_r, std::abs(fd_dir - an.dot(dir)) /
                                            std::max(std::abs(fd_dir), 1e-8));
  }
  rep.line("lambda1 gradient: radial (Hadamard vs FD)", worst_lam_r, lam_tol);

  double worst_lam_v = 0.0;
  for (int r = 0; r < 2; ++r) {
    const PolygonBody p = cloud_polygon(DiagramId::D2, seed + 6000 + r);
    const int M = p.count();
    const auto lam_verts = [&](const Eigen::VectorXd& v) {
      PolygonBody q;
      q.vertices.resize(M);
      for (int k = 0; k < M; ++k) q.vertices[k] = {v(2 * k), v(2 * k + 1)};
      return lambda1(mesh_mapped(q, polygon_centroid(q.vertices), ref)).lambda1;
    };
    const Vec2 o = polygon_centroid(p.vertices);
    const TriMesh mesh = mesh_mapped(p, o, ref);
    const EigResult eig = lambda1(mesh);
    const Eigen::VectorXd an = grad_vertices_lambda1(p, mesh, eig, o);
    Eigen::VectorXd x(2 * M);
    for (int k = 0; k < M; ++k) {
      x(2 * k) = p.vertices[k].x;
      x(2 * k + 1) = p.vertices[k].y;
    }
    Eigen::VectorXd dir = an.normalized();
    const double t = 1e-4;
    const double fd_dir = (lam_verts(x + t * dir) - lam_verts(x - t * dir)) / (2.0 * t);
    worst_lam_v = std::max(worst_lam_v, std::abs(fd_dir - an.dot(dir)) /
                                            std::max(std::abs(fd_dir), 1e-8));
  }
  rep.line("lambda1 gradient: vertices (Hadamard vs FD)", worst_lam_v, lam_tol);

  // diameter directional derivative vs one-sided FD on 50 polygon/field pairs
  double worst_diam = 0.0;
  for (int r = 0; r < 50; ++r) {
    const PolygonBody p = cloud_polygon(DiagramId::D1, seed + 7000 + r);
    Rng rng(seed + 7500 + r);
    const double a1 = rng.uniform(-1, 1), a2 = rng.uniform(-1, 1), a3 = rng.uniform(-1, 1);
    const double b1 = rng.uniform(-1, 1), b2 = rng.uniform(-1, 1), b3 = rng.uniform(-1, 1);
    PerturbationField V;
    V.eval = [=](const Vec2& q) {
      return Vec2{a1 * q.x + a2 * q.y + a3 * std::sin(q.x + q.y),
                  b1 * q.x + b2 * q.y + b3 * std::cos(q.x - q.y)};
    };
    const DiameterDerivative dd = diameter_directional(p, V);
    const double t = 1e-6;
    PolygonBody moved = p;
    for (Vec2& q : moved.vertices) q += t * V(q);
    const double fd = (brute_force_diameter(moved) - brute_force_diameter(p)) / t;
    worst_diam =
        std::max(worst_diam, std::abs(fd - dd.rate) / std::max({std::abs(fd), std::abs(dd.rate), 1e-6}));
  }
  rep.line("diameter directional derivative vs FD", worst_diam, diam_tol);

  std::printf("gradcheck: %s\n", rep.failures == 0 ? "all passed" : "FAILURES");
  return rep.failures == 0 ? 0 : 1;
}

// ---- invariants ------------------------------------------------------------------

int cmd_invariants(std::uint64_t seed, int n_geo, int n_fem, int fem_triangles) {
  CheckReport rep;
  const double slack = 1e-9;

  double worst = 0.0;  // signed: positive means violated
  for (int i = 0; i < n_geo; ++i) {
    const PolygonBody poly = cloud_polygon(DiagramId::D1, cloud_item_seed(seed, i));
    const GeoSummary g = polygon_functionals(poly);
    const double d = *g.d;
    worst = std::max(worst, 4.0 * kPi * g.A - g.P * g.P);        // P^2 >= 4 pi A
    worst = std::max(worst, g.A - kPi * d * d / 4.0);            // A <= pi d^2/4
    worst = std::max(worst, 2.0 * d - g.P);                      // 2d <= P
    worst = std::max(worst, g.P - kPi * d);                      // P <= pi d
    worst = std::max(worst, g.P - (g.A / d + 2.0 * d));          // P <= A/d + 2d
    worst = std::max(worst, 4.0 * g.A - g.P * d);                // 4A <= P d
  }
  rep.line("geometric inequalities on random convex polygons", std::max(worst, 0.0), slack);

  double worst_fem = 0.0;  // relative violation of the sandwiches
  for (int i = 0; i < n_fem; ++i) {
    const PolygonBody poly = cloud_polygon(DiagramId::D2, cloud_item_seed(seed ^ 0x5a5a5a5a, i));
    const GeoSummary g = polygon_functionals(poly);
    const double lam = lambda1_of_polygon(poly, fem_triangles).lambda1;
    const double d = *g.d;
    const double polya_lo = kPi * kPi / 16.0 * (g.P / g.A) * (g.P / g.A);
    const double polya_hi = kPi * kPi / 4.0 * (g.P / g.A) * (g.P / g.A);
    const double ilias_lo = kPi * kPi / 4.0 * (d / g.A) * (d / g.A);
    const double ilias_hi =
        kPi * kPi / 4.0 * std::pow(4.0 * std::sqrt(g.A) / d + 2.0 * d / std::sqrt(g.A), 2.0);
    worst_fem = std::max(worst_fem, (polya_lo - lam) / polya_lo);
    worst_fem = std::max(worst_fem, (lam - polya_hi) / polya_hi);
    worst_fem = std::max(worst_fem, (ilias_lo - lam) / ilias_lo);
    worst_fem = std::max(worst_fem, (lam - ilias_hi) / ilias_hi);
  }
  rep.line("spectral sandwiches on FEM-evaluated bodies", std::max(worst_fem, 0.0), 1e-2);

  std::printf("invariants: %s\n", rep.failures == 0 ? "all passed" : "FAILURES");
  return rep.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar convex-body shape optimization and diagram tracing"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  auto* eval_cmd = app.add_subcommand("eval", "print P,A,d,w,lambda1 for a body JSON file");
  std::string body_file;
  bool spectral = false;
  int fem_eval_tris = 20000;
  eval_cmd->add_option("body", body_file, "body JSON file")->required();
  eval_cmd->add_flag("--spectral", spectral, "also compute lambda1 (FEM)");
  eval_cmd->add_option("--fem-triangles", fem_eval_tris, "FEM mesh size");

  auto* cloud_cmd = app.add_subcommand("cloud", "random convex-polygon cloud CSV");
  bool cloud_svg = false;
  cloud_cmd->add_option("--config", config_path, "JSON config (flags override)");
  cloud_cmd->add_option("--diagram", cfg.diagram, "d1|d2|d3");
  cloud_cmd->add_option("--n", cfg.n, "number of polygons");
  cloud_cmd->add_option("--seed", cfg.seed, "master seed");
  cloud_cmd->add_option("--out", cfg.out, "output directory");
  cloud_cmd->add_option("--min-sides", cfg.min_sides, "minimum hull sides");
  cloud_cmd->add_option("--max-sides", cfg.max_sides, "maximum hull sides");
  cloud_cmd->add_option("--fem-triangles", cfg.fem_cloud, "FEM mesh size for lambda");
  cloud_cmd->add_flag("--svg", cloud_svg, "also write a scatter SVG");

  auto* sweep_cmd = app.add_subcommand("sweep", "trace diagram boundary curves");
  sweep_cmd->add_option("--config", config_path, "JSON config (flags override)");
  sweep_cmd->add_option("--diagram", cfg.diagram, "d1|d2|d3");
  sweep_cmd->add_option("--grid", cfg.grid, "a:b:n abscissa grid");
  sweep_cmd->add_option("--phases", cfg.phases, "e.g. support:80,radial:200");
  sweep_cmd->add_option("--phases-upper", cfg.phases_upper, "upper-curve phases");
  sweep_cmd->add_option("--seed", cfg.seed, "seed (cloud overlay)");
  sweep_cmd->add_option("--out", cfg.out, "output directory");
  sweep_cmd->add_option("--cloud", cfg.cloud, "overlay cloud of N random bodies");
  sweep_cmd->add_option("--tol-feas", cfg.tol_feas, "solver feasibility tolerance");
  sweep_cmd->add_option("--tol-grad", cfg.tol_grad, "solver gradient tolerance");
  sweep_cmd->add_option("--max-iter", cfg.max_iter, "solver iteration budget");
  sweep_cmd->add_option("--starts", cfg.starts, "cap multistart count (0 = auto)");
  sweep_cmd->add_option("--fem-opt", cfg.fem_opt, "FEM mesh size inside optimization");
  sweep_cmd->add_option("--fem-eval", cfg.fem_eval, "FEM mesh size for reported values");

  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference gradient suites");
  std::uint64_t gc_seed = 20240601;
  int gc_bodies = 20, gc_tris = 3000;
  grad_cmd->add_option("--seed", gc_seed, "seed");
  grad_cmd->add_option("--bodies", gc_bodies, "bodies per parametrization");
  grad_cmd->add_option("--fem-triangles", gc_tris, "FEM mesh size");

  auto* inv_cmd = app.add_subcommand("invariants", "inequality property suites");
  std::uint64_t inv_seed = 20240601;
  int inv_geo = 10000, inv_fem = 200, inv_tris = 4000;
  inv_cmd->add_option("--seed", inv_seed, "seed");
  inv_cmd->add_option("--n", inv_geo, "geometric sample count");
  inv_cmd->add_option("--fem-bodies", inv_fem, "FEM sample count");
  inv_cmd->add_option("--fem-triangles", inv_tris, "FEM mesh size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      RunConfig file_cfg;
      load_config(config_path, file_cfg);
      // flags override: reparse onto the file config (flags seen win)
      RunConfig merged = file_cfg;
      // simple merge: any flag the user passed already updated cfg, so copy
      // non-default flag values over the file config
      RunConfig defaults;
      if (cfg.diagram != defaults.diagram) merged.diagram = cfg.diagram;
      if (cfg.grid != defaults.grid) merged.grid = cfg.grid;
      if (cfg.phases != defaults.phases) merged.phases = cfg.phases;
      if (cfg.phases_upper != defaults.phases_upper) merged.phases_upper = cfg.phases_upper;
      if (cfg.seed != defaults.seed) merged.seed = cfg.seed;
      if (cfg.out != defaults.out) merged.out = cfg.out;
      if (cfg.cloud != defaults.cloud) merged.cloud = cfg.cloud;
      if (cfg.n != defaults.n) merged.n = cfg.n;
      if (cfg.min_sides != defaults.min_sides) merged.min_sides = cfg.min_sides;
      if (cfg.max_sides != defaults.max_sides) merged.max_sides = cfg.max_sides;
      if (cfg.spectral != defaults.spectral) merged.spectral = cfg.spectral;
      if (cfg.tol_feas != defaults.tol_feas) merged.tol_feas = cfg.tol_feas;
      if (cfg.tol_grad != defaults.tol_grad) merged.tol_grad = cfg.tol_grad;
      if (cfg.max_iter != defaults.max_iter) merged.max_iter = cfg.max_iter;
      if (cfg.starts != defaults.starts) merged.starts = cfg.starts;
      if (cfg.fem_opt != defaults.fem_opt) merged.fem_opt = cfg.fem_opt;
      if (cfg.fem_eval != defaults.fem_eval) merged.fem_eval = cfg.fem_eval;
      if (cfg.fem_cloud != defaults.fem_cloud) merged.fem_cloud = cfg.fem_cloud;
      cfg = merged;
    }

    if (eval_cmd->parsed()) return cmd_eval(body_file, spectral, fem_eval_tris);
    if (cloud_cmd->parsed()) return cmd_cloud(cfg, cloud_svg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    if (grad_cmd->parsed()) return cmd_gradcheck(gc_seed, gc_bodies, gc_tris);
    if (inv_cmd->parsed()) return cmd_invariants(inv_seed, inv_geo, inv_fem, inv_tris);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
