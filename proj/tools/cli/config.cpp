// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "cli/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "specdet/error.hpp"

namespace specdet::cli {

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"zeta",   "gkdet",  "factorize", "derivatives",
                                              "renormalize", "gff-mc", "dgff",      "order"};
  return names;
}

std::string sha256_hex(const void* data, std::size_t size) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, size, digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::io, "sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {

json term(const std::string& type, Mode mode, double amplitude) {
  return {{"type", type}, {"mode", {mode[0], mode[1]}}, {"amplitude", amplitude}};
}

json constant_term(double value) { return {{"type", "constant"}, {"re", value}, {"im", 0.0}}; }

struct Defaults {
  Geometry geometry;
  json perturbation;
  int cutoff;
  json methods;
  json tolerances;
};

Defaults defaults_for(const std::string& experiment) {
  const Geometry circle{GeometryKind::circle, 2 * pi, 1.0, 0};
  const Geometry torus{GeometryKind::torus2, 2 * pi, 1.0, 0};
  if (experiment == "zeta")
    return {{GeometryKind::circle, 2 * pi, 0.5, 0}, json::array(), 512, {{"reference", "auto"}},
            {{"relative", 1e-6}}};
  if (experiment == "gkdet")
    return {circle, {constant_term(0.3), term("cos", {1, 0}, 0.5)}, 64,
            {{"p", 0}, {"z", {1.0, 0.0}}, {"tail_correction", true}}, {{"routes", 1e-8}}};
  if (experiment == "factorize")
    return {circle,
            {term("cos", {1, 0}, 0.6)},
            64,
            {{"operator", "laplace"},
             {"dirac_mass", 0.5},
             {"z_min", -1.0},
             {"z_max", 1.0},
             {"points", 11},
             {"p", 0},
             {"allowed_degree", -1}},
            {{"fit", 1e-4}}};
  if (experiment == "derivatives")
    return {circle,
            {constant_term(0.3), term("cos", {1, 0}, 0.5)},
            64,
            {{"kind", "trace_identity"}, {"orders", {2, 3}}, {"steps", json::array()}, {"bumps", json::array()},
             {"band", 16}},
            {{"relative", 1e-3}}};
  if (experiment == "renormalize")
    return {torus,
            {constant_term(0.5)},
            8,
            {{"eps_min", 2e-4}, {"eps_max", 2e-2}, {"points", 16}},
            {{"fit_residual", 1e-6}, {"richardson_gap", 1e-5}}};
  if (experiment == "gff-mc")
    return {circle,
            {constant_term(0.5), term("cos", {1, 0}, 0.4)},
            64,
            {{"epsilon", 0.05}, {"samples", 10000}, {"renormalized", false}, {"scan_eps", json::array()}},
            {{"sigmas", 3.0}}};
  if (experiment == "dgff")
    return {torus,
            {term("cos", {1, 0}, 0.25), term("cos", {0, 1}, 0.25)},
            32,
            {{"sizes", {16, 32, 64, 128}}},
            {{"relative", 1e-2}}};
  if (experiment == "order") return {circle, {term("cos", {1, 0}, 0.5)}, 64, {{"p", 0}}, json::object()};
  std::string known;
  for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("experiment", "unknown experiment '" + experiment + "' (expected one of " + known + ")");
}

const char* type_name(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path + key, "missing required field");
  return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, std::string("expected a number, got ") + type_name(v));
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, std::string("expected an integer, got ") + type_name(v));
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, std::string("expected a string, got ") + type_name(v));
  return v.get<std::string>();
}

void check_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, std::string("expected an object, got ") + type_name(v));
}

void reject_unknown(const json& obj, const std::vector<std::string>& allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == it.key();
    if (!ok) throw ConfigError(path + it.key(), "unknown field");
  }
}

Geometry parse_geometry(const json& g) {
  check_object(g, "geometry");
  reject_unknown(g, {"kind", "length", "mass", "lattice_size"}, "geometry.");
  Geometry out;
  const std::string kind = as_string(require(g, "kind", "geometry."), "geometry.kind");
  if (kind == "circle")
    out.kind = GeometryKind::circle;
  else if (kind == "torus2")
    out.kind = GeometryKind::torus2;
  else if (kind == "lattice_torus")
    out.kind = GeometryKind::lattice_torus;
  else
    throw ConfigError("geometry.kind", "expected circle, torus2 or lattice_torus, got '" + kind + "'");
  out.length = as_number(require(g, "length", "geometry."), "geometry.length");
  out.mass = as_number(require(g, "mass", "geometry."), "geometry.mass");
  if (g.contains("lattice_size")) out.lattice_size = as_int(g.at("lattice_size"), "geometry.lattice_size");
  if (!(out.length > 0)) throw ConfigError("geometry.length", "must be positive");
  if (out.mass < 0) throw ConfigError("geometry.mass", "must be non-negative");
  if (out.kind == GeometryKind::lattice_torus && out.lattice_size < 2)
    throw ConfigError("geometry.lattice_size", "must be at least 2 for a lattice torus");
  if (out.kind != GeometryKind::lattice_torus && out.lattice_size != 0)
    throw ConfigError("geometry.lattice_size", "only a lattice torus has a lattice size");
  try {
    out.validate();
  } catch (const Error& e) {
    throw ConfigError("geometry", e.what());
  }
  return out;
}

Mode parse_mode(const json& v, int dim, const std::string& path) {
  if (!v.is_array() || v.empty() || v.size() > 2)
    throw ConfigError(path, "expected an array of one or two integers");
  Mode m{as_int(v[0], path + "[0]"), v.size() > 1 ? as_int(v[1], path + "[1]") : 0};
  if (dim == 1 && m[1] != 0) throw ConfigError(path + "[1]", "must be 0 on the circle");
  return m;
}

PerturbationTerm parse_term(const json& t, int dim, const std::string& path) {
  check_object(t, path);
  PerturbationTerm out;
  out.type = as_string(require(t, "type", path + "."), path + ".type");
  const std::string p = path + ".";
  if (out.type == "constant") {
    reject_unknown(t, {"type", "re", "im"}, p);
    out.re = as_number(require(t, "re", p), p + "re");
    if (t.contains("im")) out.im = as_number(t.at("im"), p + "im");
  } else if (out.type == "cos" || out.type == "sin") {
    reject_unknown(t, {"type", "mode", "amplitude"}, p);
    out.mode = parse_mode(require(t, "mode", p), dim, p + "mode");
    if (out.mode == Mode{0, 0}) throw ConfigError(p + "mode", "must be nonzero; use a constant term");
    out.amplitude = as_number(require(t, "amplitude", p), p + "amplitude");
  } else if (out.type == "coefficient") {
    reject_unknown(t, {"type", "mode", "re", "im"}, p);
    out.mode = parse_mode(require(t, "mode", p), dim, p + "mode");
    out.re = as_number(require(t, "re", p), p + "re");
    if (t.contains("im")) out.im = as_number(t.at("im"), p + "im");
  } else if (out.type == "bump") {
    reject_unknown(t, {"type", "center", "radius", "amplitude", "band"}, p);
    const json& c = require(t, "center", p);
    if (!c.is_array() || c.empty() || c.size() > 2) throw ConfigError(p + "center", "expected one or two numbers");
    out.bump.center = {as_number(c[0], p + "center[0]"), c.size() > 1 ? as_number(c[1], p + "center[1]") : 0.0};
    out.bump.radius = as_number(require(t, "radius", p), p + "radius");
    if (!(out.bump.radius > 0)) throw ConfigError(p + "radius", "must be positive");
    out.bump.amplitude = as_number(require(t, "amplitude", p), p + "amplitude");
    out.band = as_int(require(t, "band", p), p + "band");
    if (out.band < 1) throw ConfigError(p + "band", "must be at least 1");
  } else {
    throw ConfigError(p + "type", "expected constant, cos, sin, coefficient or bump, got '" + out.type + "'");
  }
  return out;
}

json term_to_json(const PerturbationTerm& t) {
  json j{{"type", t.type}};
  if (t.type == "constant") {
    j["re"] = t.re;
    j["im"] = t.im;
  } else if (t.type == "cos" || t.type == "sin") {
    j["mode"] = {t.mode[0], t.mode[1]};
    j["amplitude"] = t.amplitude;
  } else if (t.type == "coefficient") {
    j["mode"] = {t.mode[0], t.mode[1]};
    j["re"] = t.re;
    j["im"] = t.im;
  } else {
    j["center"] = {t.bump.center[0], t.bump.center[1]};
    j["radius"] = t.bump.radius;
    j["amplitude"] = t.bump.amplitude;
    j["band"] = t.band;
  }
  return j;
}

// Merges overrides into defaults.  Each override must name a default key
// and match its JSON type (integers are accepted where numbers are).
json merge_section(const json& defaults, const json& given, const std::string& section) {
  check_object(given, section);
  json out = defaults;
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string path = section + "." + it.key();
    if (!defaults.contains(it.key())) throw ConfigError(path, "unknown field for this experiment");
    const json& d = defaults.at(it.key());
    const json& v = it.value();
    const bool same = (d.is_number() && v.is_number() && (!d.is_number_integer() || v.is_number_integer())) ||
                      (d.is_boolean() && v.is_boolean()) || (d.is_string() && v.is_string()) ||
                      (d.is_array() && v.is_array());
    if (!same) throw ConfigError(path, std::string("expected ") + type_name(d) + ", got " + type_name(v));
    out[it.key()] = v;
  }
  return out;
}

void check_positive(const json& section, const std::string& key, const std::string& path) {
  if (section.contains(key) && !(as_number(section.at(key), path + "." + key) > 0))
    throw ConfigError(path + "." + key, "must be positive");
}

void check_number_array(const json& section, const std::string& key, const std::string& path, bool integer) {
  if (!section.contains(key)) return;
  const json& a = section.at(key);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string p = path + "." + key + "[" + std::to_string(i) + "]";
    const double x = integer ? as_int(a[i], p) : as_number(a[i], p);
    if (!(x > 0)) throw ConfigError(p, "must be positive");
  }
}

void validate_methods(const ExperimentConfig& c) {
  const json& m = c.methods;
  const std::string path = "methods";
  for (const char* key : {"dirac_mass", "epsilon", "eps_min", "eps_max"}) check_positive(m, key, path);
  for (const char* key : {"points", "samples", "band"}) check_positive(m, key, path);
  if (m.contains("p") && as_int(m.at("p"), "methods.p") < 0) throw ConfigError("methods.p", "must be >= 0");
  check_number_array(m, "orders", path, true);
  check_number_array(m, "sizes", path, true);
  check_number_array(m, "steps", path, false);
  check_number_array(m, "scan_eps", path, false);
  if (m.contains("z") && m.at("z").size() != 2) throw ConfigError("methods.z", "expected [re, im]");
  if (m.contains("z")) {
    as_number(m.at("z")[0], "methods.z[0]");
    as_number(m.at("z")[1], "methods.z[1]");
  }
  if (m.contains("reference")) {
    const std::string r = m.at("reference");
    if (r != "auto" && r != "closed_form" && r != "monodromy" && r != "none")
      throw ConfigError("methods.reference", "expected auto, closed_form, monodromy or none");
  }
  if (m.contains("operator")) {
    const std::string r = m.at("operator");
    if (r != "laplace" && r != "dirac") throw ConfigError("methods.operator", "expected laplace or dirac");
  }
  if (m.contains("kind")) {
    const std::string r = m.at("kind");
    if (r != "trace_identity" && r != "disjoint_support")
      throw ConfigError("methods.kind", "expected trace_identity or disjoint_support");
    if (r == "disjoint_support" && m.at("bumps").size() != 2)
      throw ConfigError("methods.bumps", "disjoint_support needs exactly two bumps");
  }
  if (m.contains("bumps")) {
    for (std::size_t i = 0; i < m.at("bumps").size(); ++i) {
      json b = m.at("bumps")[i];
      const std::string p = "methods.bumps[" + std::to_string(i) + "]";
      check_object(b, p);
      b["type"] = "bump";
      b["band"] = 1;
      parse_term(b, c.geometry.dim(), p);
    }
  }
  if (m.contains("eps_min") && m.at("eps_min").get<double>() >= m.at("eps_max").get<double>())
    throw ConfigError("methods.eps_max", "must exceed methods.eps_min");
  if (m.contains("z_min") && !(m.at("z_min").get<double>() < m.at("z_max").get<double>()))
    throw ConfigError("methods.z_max", "must exceed methods.z_min");
  for (auto it = c.tolerances.begin(); it != c.tolerances.end(); ++it) check_positive(c.tolerances, it.key(), "tolerances");
}

}  // namespace

PerturbationField build_field(const std::vector<PerturbationTerm>& terms, const Geometry& geometry) {
  const int dim = geometry.dim();
  PerturbationField v(dim);
  for (const auto& t : terms) {
    if (t.type == "constant")
      v = v + PerturbationField::constant(dim, cplx(t.re, t.im));
    else if (t.type == "cos")
      v = v + PerturbationField::cosine(dim, t.mode, t.amplitude);
    else if (t.type == "sin")
      v = v + PerturbationField::sine(dim, t.mode, t.amplitude);
    else if (t.type == "coefficient")
      v = v + PerturbationField::from_coefficients(dim, {{t.mode, cplx(t.re, t.im)}});
    else
      v = v + PerturbationField::from_bump(geometry, t.bump, t.band);
  }
  return v;
}

ExperimentConfig default_config(const std::string& experiment) {
  const Defaults d = defaults_for(experiment);
  ExperimentConfig c;
  c.experiment = experiment;
  c.geometry = d.geometry;
  for (std::size_t i = 0; i < d.perturbation.size(); ++i)
    c.perturbation.push_back(parse_term(d.perturbation[i], d.geometry.dim(), "perturbation"));
  c.cutoff = d.cutoff;
  c.methods = d.methods;
  c.tolerances = d.tolerances;
  return c;
}

ExperimentConfig parse_config(const json& doc) {
  check_object(doc, "config");
  reject_unknown(doc, {"experiment", "geometry", "perturbation", "cutoff", "methods", "tolerances", "seed", "output"},
                 "");
  const std::string name = as_string(require(doc, "experiment", ""), "experiment");
  ExperimentConfig c = default_config(name);
  if (doc.contains("geometry")) c.geometry = parse_geometry(doc.at("geometry"));
  if (doc.contains("perturbation")) {
    const json& p = doc.at("perturbation");
    if (!p.is_array()) throw ConfigError("perturbation", "expected an array of terms");
    c.perturbation.clear();
    for (std::size_t i = 0; i < p.size(); ++i)
      c.perturbation.push_back(parse_term(p[i], c.geometry.dim(), "perturbation[" + std::to_string(i) + "]"));
  } else if (c.geometry.dim() != defaults_for(name).geometry.dim()) {
    throw ConfigError("perturbation", "required when the geometry dimension differs from the default");
  }
  if (doc.contains("cutoff")) c.cutoff = as_int(doc.at("cutoff"), "cutoff");
  if (c.cutoff < 1) throw ConfigError("cutoff", "must be at least 1");
  const Defaults d = defaults_for(name);
  if (doc.contains("methods")) c.methods = merge_section(d.methods, doc.at("methods"), "methods");
  if (doc.contains("tolerances")) c.tolerances = merge_section(d.tolerances, doc.at("tolerances"), "tolerances");
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("output")) c.output = as_string(doc.at("output"), "output");
  validate_methods(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json terms = json::array();
  for (const auto& t : c.perturbation) terms.push_back(term_to_json(t));
  json geometry{{"kind", to_string(c.geometry.kind)}, {"length", c.geometry.length}, {"mass", c.geometry.mass}};
  if (c.geometry.kind == GeometryKind::lattice_torus) geometry["lattice_size"] = c.geometry.lattice_size;
  return {{"experiment", c.experiment}, {"geometry", geometry},     {"perturbation", terms},
          {"cutoff", c.cutoff},         {"methods", c.methods},     {"tolerances", c.tolerances},
          {"seed", c.seed},             {"output", c.output}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc.contains("config_hash")) return parse_config(doc.at("config"));
  return parse_config(doc);
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("output");
  return sha256_hex(j.dump());
}

}  // namespace specdet::cli
