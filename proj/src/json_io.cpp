#include "shapeopt/json_io.hpp"

#include <json.hpp>

#include "shapeopt/errors.hpp"

namespace shapeopt {

using ordered_json = nlohmann::ordered_json;

std::string body_json(const FourierBody& body) {
  ordered_json j;
  j["kind"] = body.kind == FourierKind::Support ? "support" : "gauge";
  j["N"] = body.N;
  j["a"] = body.a;
  j["b"] = body.b;
  return j.dump();
}

std::string body_json(const PolygonBody& body) {
  ordered_json j;
  j["kind"] = "polygon";
  auto verts = ordered_json::array();
  for (const Vec2& v : body.vertices) verts.push_back({v.x, v.y});
  j["vertices"] = std::move(verts);
  return j.dump();
}

std::string body_json(const RadialBody& body) {
  ordered_json j;
  j["kind"] = "radial";
  j["rho"] = body.rho;
  return j.dump();
}

ParsedBody parse_body(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("body json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ParseError("body json: missing \"kind\"");
  ParsedBody out;
  out.kind = j["kind"].get<std::string>();
  try {
    if (out.kind == "support" || out.kind == "gauge") {
      for (const auto& [key, _] : j.items())
        if (key != "kind" && key != "N" && key != "a" && key != "b")
          throw ParseError("body json: unknown key \"" + key + "\"");
      const auto a = j.at("a").get<std::vector<double>>();
      const auto b = j.at("b").get<std::vector<double>>();
      FourierBody f = out.kind == "support" ? FourierBody::support(a, b)
                                            : FourierBody::gauge(a, b);
      if (j.contains("N") && j["N"].get<int>() != f.N)
        throw ParseError("body json: N inconsistent with coefficient lengths");
      out.fourier = std::move(f);
    } else if (out.kind == "polygon") {
      for (const auto& [key, _] : j.items())
        if (key != "kind" && key != "vertices")
          throw ParseError("body json: unknown key \"" + key + "\"");
      PolygonBody p;
      for (const auto& v : j.at("vertices")) {
        if (!v.is_array() || v.size() != 2) throw ParseError("body json: bad vertex");
        p.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
      }
      if (p.count() < 3) throw ParseError("body json: polygon needs >= 3 vertices");
      out.polygon = std::move(p);
    } else if (out.kind == "radial") {
      for (const auto& [key, _] : j.items())
        if (key != "kind" && key != "rho")
          throw ParseError("body json: unknown key \"" + key + "\"");
      RadialBody r;
      r.rho = j.at("rho").get<std::vector<double>>();
      if (r.count() < 3) throw ParseError("body json: radial needs >= 3 entries");
      out.radial = std::move(r);
    } else {
      throw ParseError("body json: unknown kind \"" + out.kind + "\"");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("body json: ") + e.what());
  }
  return out;
}

}  // namespace shapeopt
