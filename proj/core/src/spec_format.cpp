#include "crdisc/spec_format.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace crdisc {

namespace {

using nlohmann::json;

PolyZZbar terms_from_json(const json& arr, const char* section) {
  if (!arr.is_array())
    throw ParseError(std::string(section) + " must be an array of terms");
  PolyZZbar p;
  for (const auto& t : arr) {
    if (!t.is_object() || !t.contains("mu") || !t.contains("nu"))
      throw ParseError(std::string(section) +
                       ": every term needs integer fields mu and nu");
    const int mu = t.at("mu").get<int>();
    const int nu = t.at("nu").get<int>();
    if (mu < 0 || nu < 0)
      throw ParseError(std::string(section) + ": negative exponent in term (" +
                       std::to_string(mu) + ", " + std::to_string(nu) + ")");
    const double re = t.value("re", 0.0);
    const double im = t.value("im", 0.0);
    p.add_term(mu, nu, cxd(re, im));
  }
  return p;
}

json terms_to_json(const PolyZZbar& p) {
  json arr = json::array();
  for (const auto& [key, c] : p.terms()) {
    json t;
    t["mu"] = key.first;
    t["nu"] = key.second;
    t["re"] = c.real() + 0.0;  // normalize -0.0
    t["im"] = c.imag() + 0.0;
    arr.push_back(t);
  }
  return arr;
}

}  // namespace

SurfaceGerm parse_germ(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("top-level value must be an object");
  if (!doc.contains("m") || !doc["m"].is_number_integer())
    throw ParseError("missing integer field \"m\"");
  if (!doc.contains("leading"))
    throw ParseError("missing field \"leading\"");

  const int m = doc["m"].get<int>();
  const PolyZZbar lead = terms_from_json(doc["leading"], "leading");
  PolyZZbar rem;
  if (doc.contains("remainder"))
    rem = terms_from_json(doc["remainder"], "remainder");
  const double radius = doc.value("radius", 1.0);

  // HermitianHomPoly::from_poly reports homogeneity/Hermitian violations
  // with the offending (mu, nu) pair.
  return SurfaceGerm::make(HermitianHomPoly::from_poly(m, lead),
                           std::move(rem), radius);
}

SurfaceGerm load_germ(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_germ(buf.str());
}

std::string format_germ(const SurfaceGerm& germ) {
  json doc;
  doc["m"] = germ.degree();
  doc["leading"] = terms_to_json(germ.leading().poly());
  doc["remainder"] = terms_to_json(germ.remainder());
  doc["radius"] = germ.radius();
  return doc.dump(2) + "\n";
}

void save_germ(const SurfaceGerm& germ, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write spec file: " + path);
  out << format_germ(germ);
}

}  // namespace crdisc
