#include "jumpsl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "jumpsl/errors.hpp"

namespace jumpsl {
namespace {

using nlohmann::json;

double number(const json& obj, const char* key, double fallback, bool required) {
  if (!obj.contains(key)) {
    if (required) throw ConfigParseError(std::string("missing numeric field \"") + key + "\"");
    return fallback;
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigParseError(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

std::vector<double> numbers(const json& v, const char* what) {
  if (!v.is_array()) throw ConfigParseError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigParseError(std::string(what) + " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Potential parse_potential(const json& v, std::size_t jump_count) {
  if (v.is_number()) return constant_potential(v.get<double>(), jump_count);
  if (!v.is_object()) throw ConfigParseError("\"potential\" must be an object");
  const std::string type = v.value("type", "piecewise_polynomial");
  if (type == "piecewise_polynomial") {
    PiecewisePolynomial pp;
    if (v.contains("breaks")) pp.breaks = numbers(v.at("breaks"), "potential.breaks");
    if (!v.contains("coefficients") || !v.at("coefficients").is_array())
      throw ConfigParseError("potential.coefficients must be an array of arrays");
    for (const auto& piece : v.at("coefficients")) pp.coefficients.push_back(numbers(piece, "coefficient list"));
    return pp;
  }
  if (type == "sampled_grid") {
    SampledGrid g;
    if (!v.contains("x") || !v.contains("q")) throw ConfigParseError("sampled_grid needs \"x\" and \"q\"");
    g.x = numbers(v.at("x"), "potential.x");
    g.q = numbers(v.at("q"), "potential.q");
    g.order = static_cast<int>(number(v, "order", 1, false));
    return g;
  }
  throw ConfigParseError("unknown potential type \"" + type + "\"");
}

BoundaryCondition parse_boundary(const json& v) {
  if (!v.is_object()) throw ConfigParseError("\"boundary\" must be an object");
  std::string type = v.value("type", "");
  if (type.empty()) type = v.contains("h1") ? "eigenparameter" : "robin";
  if (type == "robin") return RobinBoundary{number(v, "h", 0, true), number(v, "H", 0, true)};
  if (type == "eigenparameter")
    return EigenparameterBoundary{number(v, "h1", 0, true), number(v, "h2", 0, true), number(v, "h3", 0, true),
                                  number(v, "H1", 0, true), number(v, "H2", 0, true), number(v, "H3", 0, true)};
  throw ConfigParseError("unknown boundary type \"" + type + "\"");
}

}  // namespace

ProblemSpec problem_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigParseError("problem document must be a JSON object");
  ProblemSpec spec;
  if (doc.contains("jumps")) {
    if (!doc.at("jumps").is_array()) throw ConfigParseError("\"jumps\" must be an array");
    for (const auto& j : doc.at("jumps")) {
      if (!j.is_object()) throw ConfigParseError("each jump must be an object with d, a, b, c");
      spec.jumps.push_back({number(j, "d", 0, true), number(j, "a", 0, true), number(j, "b", 0, true),
                            number(j, "c", 0, false)});
    }
  }
  if (!doc.contains("potential")) throw ConfigParseError("missing \"potential\"");
  if (!doc.contains("boundary")) throw ConfigParseError("missing \"boundary\"");
  spec.potential = parse_potential(doc.at("potential"), spec.jumps.size());
  spec.boundary = parse_boundary(doc.at("boundary"));
  return spec;
}

json problem_to_json(const ProblemSpec& spec) {
  json doc;
  if (const auto* pp = std::get_if<PiecewisePolynomial>(&spec.potential)) {
    doc["potential"] = {{"type", "piecewise_polynomial"}, {"coefficients", pp->coefficients}};
    if (!pp->breaks.empty()) doc["potential"]["breaks"] = pp->breaks;
  } else {
    const auto& g = std::get<SampledGrid>(spec.potential);
    doc["potential"] = {{"type", "sampled_grid"}, {"x", g.x}, {"q", g.q}, {"order", g.order}};
  }
  if (const auto* r = std::get_if<RobinBoundary>(&spec.boundary)) {
    doc["boundary"] = {{"type", "robin"}, {"h", r->h}, {"H", r->H}};
  } else {
    const auto& e = std::get<EigenparameterBoundary>(spec.boundary);
    doc["boundary"] = {{"type", "eigenparameter"}, {"h1", e.h1}, {"h2", e.h2}, {"h3", e.h3},
                       {"H1", e.H1},               {"H2", e.H2}, {"H3", e.H3}};
  }
  doc["jumps"] = json::array();
  for (const auto& j : spec.jumps) doc["jumps"].push_back({{"d", j.d}, {"a", j.a}, {"b", j.b}, {"c", j.c}});
  return doc;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParseError("cannot read \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemSpec load_problem(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigParseError(path + ": " + e.what());
  }
  return problem_from_json(doc);
}

void write_text_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigParseError("cannot write \"" + tmp + "\"");
    out << contents;
    if (!out.flush()) throw ConfigParseError("write to \"" + tmp + "\" failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw ConfigParseError("cannot rename \"" + tmp + "\" to \"" + path + "\"");
  }
}

}  // namespace jumpsl
