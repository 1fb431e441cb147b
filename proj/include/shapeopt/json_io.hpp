#pragma once

#include <optional>
#include <string>

#include "shapeopt/bodies.hpp"

namespace shapeopt {

// Body serialization schemas (field order fixed):
//   {"kind":"support"|"gauge","N":...,"a":[...],"b":[...]}
//   {"kind":"polygon","vertices":[[x,y],...]}
//   {"kind":"radial","rho":[...]}

std::string body_json(const FourierBody& body);
std::string body_json(const PolygonBody& body);
std::string body_json(const RadialBody& body);

struct ParsedBody {
  std::string kind;  // "support", "gauge", "polygon", "radial"
  std::optional<FourierBody> fourier;
  std::optional<PolygonBody> polygon;
  std::optional<RadialBody> radial;
};

// Throws ParseError on malformed input or unknown keys.
ParsedBody parse_body(const std::string& text);

}  // namespace shapeopt
