#pragma once

// JSON readers and writers for groups, jump measures, maps, surfaces and
// edge words.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mhf/error.hpp"
#include "mhf/group.hpp"
#include "mhf/levy.hpp"
#include "mhf/loops.hpp"
#include "mhf/ribbon_map.hpp"
#include "mhf/surface.hpp"

namespace mhf::io {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

namespace detail {

template <class T>
T get(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw InputError(what + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(what + ": bad \"" + key + "\": " + e.what());
  }
}

inline int parse_int_key(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw InputError(what + ": key \"" + s + "\" is not an integer");
    return v;
  } catch (const std::logic_error&) {
    throw InputError(what + ": key \"" + s + "\" is not an integer");
  }
}

}  // namespace detail

/// {"kind":"builtin","name":"S3"} or
/// {"kind":"table","order":n,"table":[[...]],"labels":[...]}
inline GroupPtr group_from_json(const json& j) {
  auto kind = detail::get<std::string>(j, "kind", "group");
  if (kind == "builtin") return FiniteGroup::builtin(detail::get<std::string>(j, "name", "group"));
  if (kind != "table") throw InputError("group: unknown kind \"" + kind + "\"");
  int order = detail::get<int>(j, "order", "group");
  auto table = detail::get<std::vector<std::vector<Element>>>(j, "table", "group");
  if (order <= 0) throw InputError("group: order must be positive");
  if (table.size() != static_cast<std::size_t>(order)) throw InputError("group: table has the wrong number of rows");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = detail::get<std::vector<std::string>>(j, "labels", "group");
  std::string name = j.contains("name") ? detail::get<std::string>(j, "name", "group") : "G" + std::to_string(order);
  return FiniteGroup::from_table(std::move(table), std::move(labels), std::move(name));
}

inline GroupPtr read_group(const std::string& path) { return group_from_json(read_json_file(path)); }

/// {"rates": {"<label>": total rate of the class of that element}}
inline JumpMeasure levy_from_json(const GroupPtr& g, const json& j) {
  if (!j.is_object() || !j.contains("rates") || !j.at("rates").is_object()) throw InputError("levy: missing \"rates\" object");
  std::vector<double> rate(static_cast<std::size_t>(g->class_count()), 0.0);
  std::vector<char> given(rate.size(), 0);
  for (const auto& [label, v] : j.at("rates").items()) {
    auto x = g->find(label);
    if (!x) throw InputError("levy: unknown element label \"" + label + "\"");
    if (!v.is_number()) throw InputError("levy: rate of \"" + label + "\" is not a number");
    int c = g->class_of(*x);
    if (given[static_cast<std::size_t>(c)]) throw InputError("levy: class of \"" + label + "\" given twice");
    given[static_cast<std::size_t>(c)] = 1;
    rate[static_cast<std::size_t>(c)] = v.get<double>();
  }
  if (rate[0] != 0.0) throw InputError("levy: the identity class must have rate 0");
  return JumpMeasure::from_class_rates(g, rate);
}

inline JumpMeasure read_levy(const GroupPtr& g, const std::string& path) { return levy_from_json(g, read_json_file(path)); }

/// {"orientable":bool, "genus":int, "boundary":[element labels], "area":float}
/// Each boundary label names an element of the prescribed class.
inline SurfaceSpec surface_from_json(const GroupPtr& g, const json& j) {
  SurfaceSpec s;
  s.orientable = detail::get<bool>(j, "orientable", "surface");
  s.genus = detail::get<int>(j, "genus", "surface");
  if (j.contains("area")) s.area = detail::get<double>(j, "area", "surface");
  if (j.contains("boundary")) {
    for (const auto& label : detail::get<std::vector<std::string>>(j, "boundary", "surface")) {
      auto x = g->find(label);
      if (!x) throw InputError("surface: unknown element label \"" + label + "\"");
      s.boundary_classes.push_back(g->class_of(*x));
    }
  }
  s.validate(g.get());
  return s;
}

inline SurfaceSpec read_surface(const GroupPtr& g, const std::string& path) { return surface_from_json(g, read_json_file(path)); }

/// {"darts":2e, "alpha":[[d,d'],...], "sigma":{"v":[darts]}, "lambda":{"e":±1},
///  "boundary":[[darts]], "areas":{"face":float}}
inline RibbonMap map_from_json(const json& j) {
  RibbonMap::Data d;
  d.darts = detail::get<int>(j, "darts", "map");
  if (d.darts < 0 || d.darts % 2 != 0) throw InputError("map: the dart count must be even and non-negative");
  d.alpha.assign(static_cast<std::size_t>(d.darts), -1);
  for (const auto& pr : detail::get<std::vector<std::vector<int>>>(j, "alpha", "map")) {
    if (pr.size() != 2) throw InputError("map: alpha entries are pairs");
    for (int x : pr)
      if (x < 0 || x >= d.darts) throw InputError("map: alpha names dart " + std::to_string(x) + " out of range");
    if (d.alpha[static_cast<std::size_t>(pr[0])] >= 0 || d.alpha[static_cast<std::size_t>(pr[1])] >= 0) {
      throw InputError("map: a dart appears in two alpha pairs");
    }
    d.alpha[static_cast<std::size_t>(pr[0])] = pr[1];
    d.alpha[static_cast<std::size_t>(pr[1])] = pr[0];
  }
  if (!j.contains("sigma") || !j.at("sigma").is_object()) throw InputError("map: missing \"sigma\" object");
  std::map<int, std::vector<int>> rot;
  for (const auto& [k, v] : j.at("sigma").items()) {
    try {
      rot[detail::parse_int_key(k, "map sigma")] = v.get<std::vector<int>>();
    } catch (const json::exception& e) {
      throw InputError(std::string("map: bad rotation: ") + e.what());
    }
  }
  int expect = 0;
  for (auto& [v, cyc] : rot) {
    if (v != expect++) throw InputError("map: vertices must be numbered 0..V-1");
    d.rotation.push_back(std::move(cyc));
  }
  if (j.contains("lambda")) {
    d.lambda.assign(static_cast<std::size_t>(d.darts / 2), 1);
    for (const auto& [k, v] : j.at("lambda").items()) {
      int e = detail::parse_int_key(k, "map lambda");
      if (e < 0 || e >= d.darts / 2) throw InputError("map: lambda names edge " + k + " out of range");
      if (!v.is_number_integer()) throw InputError("map: lambda values are +1 or -1");
      d.lambda[static_cast<std::size_t>(e)] = v.get<int>();
    }
  }
  if (j.contains("boundary")) d.boundary = detail::get<std::vector<std::vector<int>>>(j, "boundary", "map");
  RibbonMap m(std::move(d));
  if (j.contains("areas")) {
    std::vector<double> a(static_cast<std::size_t>(m.face_count()), -1.0);
    for (const auto& [k, v] : j.at("areas").items()) {
      int f = detail::parse_int_key(k, "map areas");
      if (f < 0 || f >= m.face_count()) throw InputError("map: areas name face " + k + " out of range");
      if (!v.is_number()) throw InputError("map: areas are numbers");
      a[static_cast<std::size_t>(f)] = v.get<double>();
    }
    for (double x : a)
      if (x < 0.0) throw InputError("map: every face needs an area");
    m = m.with_areas(std::move(a));
  }
  return m;
}

inline RibbonMap read_map(const std::string& path) { return map_from_json(read_json_file(path)); }

inline json map_to_json(const RibbonMap& m) {
  json j;
  j["darts"] = m.dart_count();
  json alpha = json::array();
  for (int e = 0; e < m.edge_count(); ++e) alpha.push_back({m.positive_dart(e), m.alpha(m.positive_dart(e))});
  j["alpha"] = alpha;
  json sigma = json::object();
  for (int v = 0; v < m.vertex_count(); ++v) sigma[std::to_string(v)] = m.rotation(v);
  j["sigma"] = sigma;
  json lambda = json::object();
  for (int e = 0; e < m.edge_count(); ++e)
    if (m.lambda(e) != 1) lambda[std::to_string(e)] = m.lambda(e);
  if (!lambda.empty()) j["lambda"] = lambda;
  if (m.boundary_count() > 0) j["boundary"] = m.boundary();
  if (m.has_areas()) {
    json a = json::object();
    for (int f = 0; f < m.face_count(); ++f) a[std::to_string(f)] = m.area(f);
    j["areas"] = a;
  }
  return j;
}

/// Signed edge letters: "+e" or a bare integer e is the positive dart of edge
/// e, "-e" its reverse.
inline int dart_from_letter(const RibbonMap& m, const json& letter) {
  bool neg = false;
  int e = -1;
  if (letter.is_number_integer()) {
    e = letter.get<int>();
  } else if (letter.is_string()) {
    std::string s = letter.get<std::string>();
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
      neg = s[0] == '-';
      s = s.substr(1);
    }
    e = detail::parse_int_key(s, "word");
  } else {
    throw InputError("word: letters are integers or signed strings");
  }
  if (e < 0 || e >= m.edge_count()) throw InputError("word: edge " + std::to_string(e) + " out of range");
  int d = m.positive_dart(e);
  return neg ? m.alpha(d) : d;
}

inline std::string letter_of_dart(const RibbonMap& m, int dart) {
  return (m.is_positive(dart) ? "+" : "-") + std::to_string(m.edge_of(dart));
}

/// {"base": v, "edges": ["+0", "-2", ...]}
inline EdgeWord word_from_json(const RibbonMap& m, const json& j) {
  EdgeWord w;
  w.base = detail::get<int>(j, "base", "word");
  if (!j.contains("edges") || !j.at("edges").is_array()) throw InputError("word: missing \"edges\" array");
  for (const auto& l : j.at("edges")) w.darts.push_back(dart_from_letter(m, l));
  check_path(m, w);
  return w;
}

inline json word_to_json(const RibbonMap& m, const EdgeWord& w) {
  json edges = json::array();
  for (int d : w.darts) edges.push_back(letter_of_dart(m, d));
  return {{"base", w.base}, {"edges", edges}};
}

}  // namespace mhf::io
