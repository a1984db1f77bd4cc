// Command-line front end: group/map/surface inspection, partition functions,
// verification suites and covering computations.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mhf/characters.hpp"
#include "mhf/covering.hpp"
#include "mhf/error.hpp"
#include "mhf/group.hpp"
#include "mhf/holonomy.hpp"
#include "mhf/io.hpp"
#include "mhf/levy.hpp"
#include "mhf/ribbon_map.hpp"
#include "mhf/suites.hpp"
#include "mhf/surface.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace mhf;

enum ExitCode { kPass = 0, kFail = 1, kInput = 2, kCap = 3 };

struct RunConfig {
  std::string group, levy, surface, map;
  double time = -1.0;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  double tail_tol = kDefaultTailTol;
  double cap = kDefaultCap;
  std::string format = "json";
  std::string via;  // graph when a map is given, formula otherwise
  double perturb = 0.0;
  int k = -1;
  int count = 10;
  std::string suite;

  void validate() const {
    if (!(tol > 0.0)) throw InputError("--tol must be positive");
    if (!(tail_tol > 0.0)) throw InputError("--tail-tol must be positive");
    if (!(cap >= 1.0)) throw InputError("--cap must be at least 1");
    if (format != "json" && format != "csv") throw InputError("--format is json or csv");
  }

  json echo() const {
    json j;
    if (!group.empty()) j["group"] = group;
    j["levy"] = levy.empty() ? std::string("uniform on non-identity elements, total rate 1") : levy;
    if (!surface.empty()) j["surface"] = surface;
    if (!map.empty()) j["map"] = map;
    if (time > 0.0) j["time"] = time;
    j["seed"] = seed;
    j["tol"] = tol;
    j["tail_tol"] = tail_tol;
    j["cap"] = cap;
    if (perturb != 0.0) j["perturb"] = perturb;
    return j;
  }
};

GroupPtr load_group(const RunConfig& c) {
  if (c.group.empty()) throw InputError("--group is required");
  if (std::filesystem::exists(c.group)) return io::read_group(c.group);
  for (const auto& n : FiniteGroup::builtin_names())
    if (n == c.group) return FiniteGroup::builtin(n);
  throw InputError("--group: no such file or builtin group \"" + c.group + "\"");
}

JumpMeasure load_levy(const GroupPtr& g, const RunConfig& c) {
  if (c.levy.empty()) return JumpMeasure::uniform_nonidentity(g, 1.0);
  return io::read_levy(g, c.levy);
}

std::optional<SurfaceSpec> load_surface(const GroupPtr& g, const RunConfig& c) {
  if (c.surface.empty()) return std::nullopt;
  SurfaceSpec s = io::read_surface(g, c.surface);
  if (c.time > 0.0) s.area = c.time;
  return s;
}

std::string csv_cell(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ";" : "") << v[i];
  return os.str();
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

json labels_of(const FiniteGroup& g, const std::vector<Element>& xs) {
  json a = json::array();
  for (Element x : xs) a.push_back(g.label(x));
  return a;
}

std::string face_letter(const FramedDart& f) { return std::to_string(f.dart) + (f.eps > 0 ? "+" : "-"); }

int cmd_group_info(const RunConfig& c) {
  auto g = load_group(c);
  auto table = character_table(g);
  const auto& cls = g->classes();
  auto eta = eta_measure(g), kappa = kappa_measure(g);
  json classes = json::array();
  for (int i = 0; i < cls.count; ++i) {
    const Element rep = cls.representative[static_cast<std::size_t>(i)];
    classes.push_back({{"index", i},
                       {"size", cls.size[static_cast<std::size_t>(i)]},
                       {"representative", g->label(rep)},
                       {"inverse_class", cls.inverse_class[static_cast<std::size_t>(i)]},
                       {"members", labels_of(*g, cls.members[static_cast<std::size_t>(i)])},
                       {"eta", to_string(eta(rep))},
                       {"kappa", to_string(kappa(rep))}});
  }
  json chars = json::array();
  for (int a = 0; a < table.count(); ++a) {
    json vals = json::array();
    for (const auto& z : table.chi[static_cast<std::size_t>(a)]) vals.push_back({z.real(), z.imag()});
    chars.push_back({{"dim", table.dim[static_cast<std::size_t>(a)]}, {"fs", table.fs[static_cast<std::size_t>(a)]}, {"values", vals}});
  }
  if (c.format == "csv") {
    std::cout << "class,size,representative,eta,kappa\n";
    for (const auto& cl : classes)
      std::cout << cl["index"] << "," << cl["size"] << "," << csv_quote(cl["representative"]) << "," << cl["eta"].get<std::string>()
                << "," << cl["kappa"].get<std::string>() << "\n";
    return kPass;
  }
  json out;
  out["command"] = "group-info";
  out["inputs"] = c.echo();
  out["name"] = g->name();
  out["order"] = g->order();
  out["abelian"] = g->is_abelian();
  out["labels"] = g->labels();
  out["class_count"] = cls.count;
  out["classes"] = classes;
  out["characters"] = chars;
  out["orthogonality_defect"] = table.orthogonality_defect();
  std::cout << out.dump(2) << "\n";
  return kPass;
}

int cmd_faces(const RunConfig& c) {
  if (c.map.empty()) throw InputError("--map is required");
  RibbonMap m = io::read_map(c.map);
  auto t = m.topology();
  json faces = json::array();
  for (int f = 0; f < m.face_count(); ++f) {
    json w = json::array();
    for (const auto& fd : m.face_cycle(f)) w.push_back(face_letter(fd));
    json face{{"id", f}, {"length", w.size()}, {"cycle", w}};
    if (m.has_areas()) face["area"] = m.area(f);
    faces.push_back(face);
  }
  if (c.format == "csv") {
    std::cout << "face,length,cycle\n";
    for (const auto& f : faces) {
      std::string cyc;
      for (const auto& l : f["cycle"]) cyc += (cyc.empty() ? "" : " ") + l.get<std::string>();
      std::cout << f["id"] << "," << f["length"] << "," << csv_quote(cyc) << "\n";
    }
    return kPass;
  }
  json out;
  out["command"] = "faces";
  out["inputs"] = c.echo();
  out["vertices"] = t.v;
  out["edges"] = t.e;
  out["faces"] = t.f;
  out["euler_characteristic"] = t.chi;
  out["orientable"] = t.orientable;
  out["genus"] = t.genus;
  out["boundary_components"] = t.boundary;
  out["face_cycles"] = faces;
  std::cout << out.dump(2) << "\n";
  return kPass;
}

void print_report(const std::string& command, const RunConfig& c, const json& extra, double lhs, std::optional<double> rhs,
                  double diff, bool pass) {
  if (c.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "command,lhs,rhs,max_abs_diff,pass\n" << command << "," << lhs << ",";
    if (rhs) os << *rhs;
    os << "," << diff << "," << (pass ? "true" : "false") << "\n";
    std::cout << os.str();
    return;
  }
  json out;
  out["command"] = command;
  out["inputs"] = c.echo();
  for (auto it = extra.begin(); it != extra.end(); ++it) out[it.key()] = it.value();
  out["lhs"] = lhs;
  out["rhs"] = rhs ? json(*rhs) : json(nullptr);
  out["max_abs_diff"] = diff;
  out["pass"] = pass;
  std::cout << out.dump(2) << "\n";
}

int cmd_partition(const RunConfig& c) {
  auto g = load_group(c);
  auto pi = load_levy(g, c);
  auto s = load_surface(g, c);
  std::optional<RibbonMap> file_map;
  if (!c.map.empty()) {
    file_map = io::read_map(c.map);
    auto t = file_map->topology();
    if (!s) {
      if (t.boundary > 0) throw InputError("--surface is required for a map with boundary (it carries the boundary classes)");
      double area = c.time > 0.0 ? c.time : (file_map->has_areas() ? file_map->total_area() : 1.0);
      s = SurfaceSpec{t.orientable, t.genus, {}, area};
    } else if (t.orientable != s->orientable || t.genus != s->genus || t.boundary != s->p()) {
      throw InputError("map topology (" + std::string(t.orientable ? "orientable" : "non-orientable") +
                       " g=" + std::to_string(t.genus) + " p=" + std::to_string(t.boundary) + ") does not match the surface (" +
                       s->describe() + ")");
    }
  }
  if (!s) throw InputError("--surface or --map is required");
  const std::string via = c.via.empty() ? (file_map ? "graph" : "formula") : c.via;
  if (via != "formula" && via != "graph") throw InputError("--via is graph or formula");
  HeatKernel q(pi);
  const double formula = partition_formula(*s, q);
  json extra;
  extra["surface"] = s->describe();
  extra["area"] = s->area;
  extra["route"] = via;
  if (via == "formula") {
    extra["method"] = "sum of Q_t(x) m({x}) with Q_t from the character expansion";
    extra["value"] = formula;
    print_report("partition", c, extra, formula, std::nullopt, 0.0, true);
    return kPass;
  }
  RibbonMap m = standard_map(*s);
  if (file_map) {
    m = *file_map;
    if (!m.has_areas()) {
      m = m.with_proportional_areas(s->area);
    } else if (std::abs(m.total_area() - s->area) > 1e-12 * s->area) {
      std::vector<double> a = *m.areas();
      const double scale = s->area / m.total_area();
      for (auto& x : a) x *= scale;
      m = m.with_areas(std::move(a));
    }
  }
  const auto cons = GConstraints::from_spec(*s);
  ConstrainedSpace sp(g, m, cons);
  const double graph = partition_graph(m, cons, q, c.cap);
  const double diff = std::abs(graph - formula);
  extra["method"] = "exact summation over constrained edge configurations";
  extra["evaluations"] = static_cast<double>(sp.size());
  extra["value"] = graph;
  print_report("partition", c, extra, graph, formula, diff, diff <= c.tol);
  return diff <= c.tol ? kPass : kFail;
}

json case_json(const SuiteCase& k) {
  json j;
  j["name"] = k.name;
  j["lhs"] = k.lhs.size() == 1 ? json(k.lhs[0]) : json(k.lhs);
  j["rhs"] = k.rhs.size() == 1 ? json(k.rhs[0]) : json(k.rhs);
  j["max_abs_diff"] = k.max_abs_diff;
  j["pass"] = k.pass;
  return j;
}

SuiteConfig suite_config(const RunConfig& c) {
  SuiteConfig sc;
  sc.group = load_group(c);
  sc.pi = load_levy(sc.group, c);
  sc.surface = load_surface(sc.group, c);
  if (!c.map.empty()) sc.map = io::read_map(c.map);
  sc.time = c.time > 0.0 ? c.time : 1.0;
  sc.tol = c.tol;
  sc.tail_tol = c.tail_tol;
  sc.cap = c.cap;
  sc.perturb = c.perturb;
  return sc;
}

int print_suites(const std::string& command, const RunConfig& c, const std::vector<SuiteReport>& reports) {
  bool pass = true;
  double diff = 0.0;
  for (const auto& r : reports) {
    pass = pass && r.pass();
    diff = std::max(diff, r.max_abs_diff());
  }
  if (c.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "suite,case,lhs,rhs,max_abs_diff,pass\n";
    for (const auto& r : reports)
      for (const auto& k : r.cases)
        os << r.suite << "," << csv_quote(k.name) << "," << csv_cell(k.lhs) << "," << csv_cell(k.rhs) << "," << k.max_abs_diff
           << "," << (k.pass ? "true" : "false") << "\n";
    std::cout << os.str();
    return pass ? kPass : kFail;
  }
  json out;
  out["command"] = command;
  out["inputs"] = c.echo();
  json suites = json::array();
  for (const auto& r : reports) {
    json cases = json::array();
    for (const auto& k : r.cases) cases.push_back(case_json(k));
    suites.push_back({{"suite", r.suite},
                      {"tol", r.tol},
                      {"max_abs_diff", r.max_abs_diff()},
                      {"pass", r.pass()},
                      {"notes", r.notes},
                      {"cases", cases}});
  }
  out["suites"] = suites;
  out["max_abs_diff"] = diff;
  out["pass"] = pass;
  std::cout << out.dump(2) << "\n";
  return pass ? kPass : kFail;
}

int cmd_verify(const RunConfig& c) {
  auto sc = suite_config(c);
  std::vector<SuiteReport> reports;
  if (c.suite == "all") {
    for (const auto& n : suite_names()) reports.push_back(run_suite(n, sc));
  } else {
    reports.push_back(run_suite(c.suite, sc));
  }
  return print_suites("verify", c, reports);
}

json tuple_json(const FiniteGroup& g, const MonodromyTuple& t) {
  return {{"a", labels_of(g, t.a)}, {"c", labels_of(g, t.c)}, {"d", labels_of(g, t.d)}};
}

int cmd_cover_enumerate(const RunConfig& c) {
  auto g = load_group(c);
  auto pi = load_levy(g, c);
  auto s = load_surface(g, c);
  if (!s) throw InputError("--surface is required");
  if (c.k < 0) throw InputError("-k is required");
  auto H = enumerate_H(g, *s, c.k, c.cap);
  if (c.format == "csv") std::cout << "a,c,d,weight,aut\n";
  for (const auto& t : H) {
    if (c.format == "csv") {
      auto join = [&](const std::vector<Element>& xs) {
        std::string r;
        for (Element x : xs) r += (r.empty() ? "" : ";") + g->label(x);
        return csv_quote(r);
      };
      std::ostringstream os;
      os.precision(17);
      os << join(t.a) << "," << join(t.c) << "," << join(t.d) << "," << pi_weight(pi, t) << "," << aut_order(*g, t) << "\n";
      std::cout << os.str();
    } else {
      json j = tuple_json(*g, t);
      j["weight"] = pi_weight(pi, t);
      j["aut"] = aut_order(*g, t);
      std::cout << j.dump() << "\n";
    }
  }
  return kPass;
}

int cmd_cover_mass(const RunConfig& c) {
  auto g = load_group(c);
  auto pi = load_levy(g, c);
  auto s = load_surface(g, c);
  if (!s) throw InputError("--surface is required");
  json extra;
  extra["surface"] = s->describe();
  if (c.k >= 0) {
    double m = bb_mass(pi, *s, c.k, c.cap);
    extra["route"] = "enumeration at fixed k";
    extra["k"] = c.k;
    print_report("cover mass", c, extra, m, std::nullopt, 0.0, true);
    return kPass;
  }
  auto im = bb_mass_integrated(pi, *s, c.tail_tol, c.cap);
  HeatKernel q(pi);
  const double z = partition_formula(*s, q);
  const double diff = std::abs(im.mass - z);
  extra["route"] = "Poisson series of convolution powers (lhs) against the character formula (rhs)";
  extra["area"] = s->area;
  extra["truncation_K"] = im.truncation.K();
  extra["tail_bound"] = im.truncation.tail_bound;
  print_report("cover mass", c, extra, im.mass, z, diff, diff <= c.tol);
  return diff <= c.tol ? kPass : kFail;
}

int cmd_cover_sample(const RunConfig& c) {
  auto g = load_group(c);
  auto pi = load_levy(g, c);
  if (c.count < 0) throw InputError("--count must be non-negative");
  auto s = load_surface(g, c);
  if (!c.map.empty()) {
    RibbonMap m = io::read_map(c.map);
    if (!m.has_areas()) m = m.with_proportional_areas(c.time > 0.0 ? c.time : 1.0);
    if (m.boundary_count() > 0 && !s) throw InputError("a map with boundary needs --surface for its classes");
    MapCoveringSampler smp(m, s ? GConstraints::from_spec(*s) : GConstraints{}, pi, c.seed);
    for (int i = 0; i < c.count; ++i) {
      auto x = smp.sample();
      json j{{"counts", x.counts}, {"facial", labels_of(*g, x.facial)}, {"a", labels_of(*g, x.tuple.a)},
             {"c", labels_of(*g, x.tuple.c)}, {"d", labels_of(*g, x.tuple.d)}, {"attempts", x.attempts}};
      std::cout << j.dump() << "\n";
    }
    return kPass;
  }
  if (!s) throw InputError("--surface or --map is required");
  CoveringSampler smp(pi, *s, c.seed);
  for (int i = 0; i < c.count; ++i) {
    auto x = smp.sample();
    json j = tuple_json(*g, x.tuple);
    j["k"] = x.tuple.k();
    j["attempts"] = x.attempts;
    std::cout << j.dump() << "\n";
  }
  return kPass;
}

int cmd_cover_holo_mono(RunConfig c) {
  auto sc = suite_config(c);
  return print_suites("cover verify-holo-mono", c, {suite_holo_mono(sc)});
}

void add_common(CLI::App* app, RunConfig& c, bool model) {
  app->add_option("--format", c.format, "json or csv");
  if (!model) return;
  app->add_option("--group", c.group, "group file (JSON) or builtin name");
  app->add_option("--levy", c.levy, "Levy file (JSON); default uniform on non-identity elements");
  app->add_option("--surface", c.surface, "surface file (JSON)");
  app->add_option("--map", c.map, "map file (JSON)");
  app->add_option("--time", c.time, "total area / time");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--tol", c.tol, "comparison tolerance");
  app->add_option("--tail-tol", c.tail_tol, "Poisson truncation tail");
  app->add_option("--cap", c.cap, "brute-force evaluation cap");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-group holonomy fields and random ramified coverings"};
  app.require_subcommand(1);
  RunConfig c;

  auto* gi = app.add_subcommand("group-info", "classes, characters, eta, kappa");
  add_common(gi, c, false);
  gi->add_option("--group", c.group, "group file (JSON) or builtin name")->required();

  auto* fa = app.add_subcommand("faces", "faces and topology of a map");
  add_common(fa, c, false);
  fa->add_option("--map", c.map, "map file (JSON)")->required();

  auto* pa = app.add_subcommand("partition", "partition function of a surface");
  add_common(pa, c, true);
  pa->add_option("--via", c.via, "graph or formula");

  auto* ve = app.add_subcommand("verify", "verification suites");
  add_common(ve, c, true);
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  ve->add_option("suite", c.suite, "suite name")->required()->check(CLI::IsMember(suites));
  ve->add_option("--perturb", c.perturb, "relative perturbation of the tested kernel (negative control)");

  auto* co = app.add_subcommand("cover", "ramified coverings");
  co->require_subcommand(1);
  auto* ce = co->add_subcommand("enumerate", "monodromy tuples as JSON lines");
  add_common(ce, c, true);
  ce->add_option("-k", c.k, "ramification count")->required();
  auto* cm = co->add_subcommand("mass", "covering measure mass");
  add_common(cm, c, true);
  cm->add_option("-k", c.k, "fixed ramification count (default: Poisson average)");
  auto* cs = co->add_subcommand("sample", "sample coverings as JSON lines");
  add_common(cs, c, true);
  cs->add_option("--count", c.count, "number of samples");
  auto* ch = co->add_subcommand("verify-holo-mono", "holonomy field against covering monodromy");
  add_common(ch, c, true);
  ch->add_option("--perturb", c.perturb, "relative perturbation of the tested kernel (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    c.validate();
    if (*gi) return cmd_group_info(c);
    if (*fa) return cmd_faces(c);
    if (*pa) return cmd_partition(c);
    if (*ve) return cmd_verify(c);
    if (*ce) return cmd_cover_enumerate(c);
    if (*cm) return cmd_cover_mass(c);
    if (*cs) return cmd_cover_sample(c);
    if (*ch) return cmd_cover_holo_mono(c);
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kFail;
  }
  return kInput;
}
