#pragma once

// Verification suites shared by the command-line tool: each case compares
// two independently computed quantities.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mhf/characters.hpp"
#include "mhf/covering.hpp"
#include "mhf/error.hpp"
#include "mhf/group.hpp"
#include "mhf/holonomy.hpp"
#include "mhf/levy.hpp"
#include "mhf/loops.hpp"
#include "mhf/measure.hpp"
#include "mhf/rational.hpp"
#include "mhf/ribbon_map.hpp"
#include "mhf/surface.hpp"

namespace mhf {

struct SuiteCase {
  std::string name;
  std::vector<double> lhs, rhs;
  double max_abs_diff = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  double tol = 0.0;
  std::vector<SuiteCase> cases;
  std::vector<std::string> notes;

  bool pass() const {
    return std::all_of(cases.begin(), cases.end(), [](const SuiteCase& c) { return c.pass; });
  }
  double max_abs_diff() const {
    double d = 0.0;
    for (const auto& c : cases) d = std::max(d, c.max_abs_diff);
    return d;
  }
};

struct SuiteConfig {
  GroupPtr group;
  JumpMeasure pi;
  std::optional<SurfaceSpec> surface;
  std::optional<RibbonMap> map;
  double time = 1.0;
  double tol = 1e-9;
  double tail_tol = kDefaultTailTol;
  double cap = kDefaultCap;
  /// Relative change of Π on the side under test; non-zero only for
  /// negative controls.
  double perturb = 0.0;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"surgery", "semigroup", "kappa-eta", "subdivision",
                                              "tame",    "holo-mono", "counting"};
  return names;
}

namespace detail {

inline SuiteCase make_case(std::string name, std::vector<double> lhs, std::vector<double> rhs, double tol) {
  SuiteCase c{std::move(name), std::move(lhs), std::move(rhs), 0.0, false};
  if (c.lhs.size() != c.rhs.size()) {
    c.max_abs_diff = std::numeric_limits<double>::infinity();
    return c;
  }
  for (std::size_t i = 0; i < c.lhs.size(); ++i) c.max_abs_diff = std::max(c.max_abs_diff, std::abs(c.lhs[i] - c.rhs[i]));
  c.pass = c.max_abs_diff <= tol;
  return c;
}

inline JumpMeasure perturbed(const JumpMeasure& pi, double eps) {
  if (eps == 0.0) return pi;
  return JumpMeasure(pi.measure().scaled(1.0 + eps));
}

struct Kernels {
  HeatKernel ref;
  HeatKernel test;
};

inline Kernels kernels(const SuiteConfig& cfg) {
  HeatKernel ref(cfg.pi);
  return {ref, HeatKernel(perturbed(cfg.pi, cfg.perturb), ref.table_ptr())};
}

inline std::string zname(bool orientable, int p, int g, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "Z%c(p=%d,g=%d,t=%g)", orientable ? '+' : '-', p, g, t);
  return buf;
}

inline int nontrivial_class(const FiniteGroup& g) {
  if (g.class_count() < 2) throw InputError("suite: the group has no non-identity class");
  return 1;
}

inline std::vector<SurfaceSpec> default_surfaces(const SuiteConfig& cfg, bool with_three_holed) {
  if (cfg.surface) {
    SurfaceSpec s = *cfg.surface;
    s.area = cfg.time;
    return {s};
  }
  int c = nontrivial_class(*cfg.group);
  std::vector<SurfaceSpec> out{{true, 2, {}, cfg.time}, {false, 2, {}, cfg.time}, {true, 0, {c}, cfg.time}};
  if (with_three_holed) out.push_back({true, 0, {c, c, c}, cfg.time});
  return out;
}

}  // namespace detail

/// Series versus characters, and Q_s ★ Q_t = Q_{s+t}.
inline SuiteReport suite_semigroup(const SuiteConfig& cfg) {
  SuiteReport r{"semigroup", cfg.tol, {}, {}};
  auto k = detail::kernels(cfg);
  for (double t : {0.1, 1.0, 5.0}) {
    auto lhs = heat_kernel_series(k.test.jump(), t, cfg.tail_tol).values();
    r.cases.push_back(detail::make_case("series vs characters t=" + std::to_string(t), lhs, k.ref.at(t).values(), cfg.tol));
  }
  for (auto [s, t] : {std::pair{0.3, 0.7}, std::pair{1.0, 2.0}}) {
    auto lhs = density_convolve(k.test.at(s), k.test.at(t)).values();
    r.cases.push_back(
        detail::make_case("Q_s*Q_t vs Q_{s+t} s=" + std::to_string(s) + " t=" + std::to_string(t), lhs, k.ref.at(s + t).values(), cfg.tol));
  }
  return r;
}

/// κ∗η = κ^{∗3} exactly; η̂(α) = 1/d_α and κ̂(α) = FS(α).
inline SuiteReport suite_kappa_eta(const SuiteConfig& cfg) {
  SuiteReport r{"kappa-eta", cfg.tol, {}, {}};
  const GroupPtr& g = cfg.group;
  MeasureQ kappa = kappa_measure(g), eta = eta_measure(g);
  MeasureQ lhs = convolve(kappa, eta), rhs = convolution_power(kappa, 3);
  auto c = detail::make_case("kappa*eta = kappa^3 (exact)", lhs.to_double().weights(), rhs.to_double().weights(), 0.0);
  c.pass = lhs == rhs;
  r.cases.push_back(c);
  auto table = character_table(g);
  std::vector<double> eh, ed, kh, kf;
  double imag = 0.0;
  for (int a = 0; a < table.count(); ++a) {
    Complex e = fourier_coefficient(eta, table, a), kk = fourier_coefficient(kappa, table, a);
    imag = std::max({imag, std::abs(e.imag()), std::abs(kk.imag())});
    eh.push_back(e.real());
    ed.push_back(1.0 / table.dim[static_cast<std::size_t>(a)]);
    kh.push_back(kk.real());
    kf.push_back(table.fs[static_cast<std::size_t>(a)]);
  }
  r.cases.push_back(detail::make_case("eta^(alpha) = 1/d_alpha", eh, ed, cfg.tol));
  r.cases.push_back(detail::make_case("kappa^(alpha) = FS(alpha)", kh, kf, cfg.tol));
  r.cases.push_back(detail::make_case("imaginary parts vanish", {imag}, {0.0}, cfg.tol));
  return r;
}

/// υ, β₁ and β₂ relations between tabulated partition functions.
inline SuiteReport suite_surgery(const SuiteConfig& cfg) {
  SuiteReport r{"surgery", cfg.tol, {}, {}};
  auto k = detail::kernels(cfg);
  const bool nonorientable_ok = cfg.pi.inversion_invariant();
  if (!nonorientable_ok) r.notes.push_back("jump measure not inversion-invariant: non-orientable cases skipped");
  struct Type {
    bool o;
    int p, g;
  };
  std::vector<Type> types;
  for (int p = 0; p <= 3; ++p) {
    for (int g : {0, 2}) types.push_back({true, p, g});
    if (nonorientable_ok)
      for (int g : {1, 2}) types.push_back({false, p, g});
  }
  const std::vector<double> times{0.5, 1.0};
  for (double t : times) {
    for (const auto& ty : types) {
      if (ty.p >= 1 && nonorientable_ok) {
        auto lhs = upsilon(z_function(ty.o, ty.p, ty.g, t, k.test));
        auto rhs = z_function(false, ty.p - 1, ty.g + 1, t, k.ref);
        r.cases.push_back(detail::make_case("upsilon " + detail::zname(ty.o, ty.p, ty.g, t), lhs.values(), rhs.values(), cfg.tol));
      }
      if (ty.p >= 2) {
        auto lhs = beta1(z_function(ty.o, ty.p, ty.g, t, k.test));
        auto rhs = z_function(ty.o, ty.p - 2, ty.g + 2, t, k.ref);
        r.cases.push_back(detail::make_case("beta1 " + detail::zname(ty.o, ty.p, ty.g, t), lhs.values(), rhs.values(), cfg.tol));
      }
    }
    for (double t2 : times) {
      for (const auto& a : types) {
        if (a.p < 1) continue;
        auto za = z_function(a.o, a.p, a.g, t, k.test);
        for (const auto& b : types) {
          if (b.p < 1) continue;
          auto lhs = beta2(za, z_function(b.o, b.p, b.g, t2, k.test));
          auto rhs = z_function(a.o && b.o, a.p + b.p - 2, a.g + b.g, t + t2, k.ref);
          r.cases.push_back(detail::make_case("beta2 " + detail::zname(a.o, a.p, a.g, t) + " x " + detail::zname(b.o, b.p, b.g, t2),
                                              lhs.values(), rhs.values(), cfg.tol));
        }
      }
    }
  }
  return r;
}

/// Partition function by summation on the standard map, an edge subdivision
/// and a face split, against the closed formula.
inline SuiteReport suite_subdivision(const SuiteConfig& cfg) {
  SuiteReport r{"subdivision", cfg.tol, {}, {}};
  auto k = detail::kernels(cfg);
  for (const auto& s : detail::default_surfaces(cfg, true)) {
    if (!s.orientable && !cfg.pi.inversion_invariant()) {
      r.notes.push_back(s.describe() + " skipped: jump measure not inversion-invariant");
      continue;
    }
    const double z = partition_formula(s, k.ref);
    const auto c = GConstraints::from_spec(s);
    RibbonMap m = standard_map(s);
    r.cases.push_back(detail::make_case(s.describe() + " standard map", {partition_graph(m, c, k.test, cfg.cap)}, {z}, cfg.tol));
    if (m.edge_count() > 0) {
      auto sub = subdivide_edge(m, 0).fine;
      r.cases.push_back(detail::make_case(s.describe() + " subdivided", {partition_graph(sub, c, k.test, cfg.cap)}, {z}, cfg.tol));
    }
    const int L = static_cast<int>(m.face_cycle(0).size());
    if (L >= 2) {
      auto split = split_face(m, 0, 0, std::min(2, L - 1), std::make_pair(0.4 * s.area, 0.6 * s.area)).fine;
      r.cases.push_back(detail::make_case(s.describe() + " face split", {partition_graph(split, c, k.test, cfg.cap)}, {z}, cfg.tol));
    }
  }
  return r;
}

/// Exact joint law of the tame generators against the closed form.
inline SuiteReport suite_tame(const SuiteConfig& cfg) {
  SuiteReport r{"tame", cfg.tol, {}, {}};
  auto k = detail::kernels(cfg);
  std::vector<std::pair<std::string, RibbonMap>> maps;
  std::vector<GConstraints> cons;
  if (cfg.map) {
    if (cfg.map->boundary_count() > 0 && !cfg.surface) throw InputError("tame: a map with boundary needs --surface for its classes");
    RibbonMap m = cfg.map->has_areas() ? *cfg.map : cfg.map->with_proportional_areas(cfg.time);
    maps.emplace_back("given map", m);
    cons.push_back(cfg.surface ? GConstraints::from_spec(*cfg.surface) : GConstraints{});
  } else {
    for (const auto& s : detail::default_surfaces(cfg, false)) {
      if (!s.orientable && !cfg.pi.inversion_invariant()) continue;
      RibbonMap m = standard_map(s);
      const int L = static_cast<int>(m.face_cycle(0).size());
      maps.emplace_back(s.describe() + " one face", m);
      cons.push_back(GConstraints::from_spec(s));
      if (L >= 2) {
        maps.emplace_back(s.describe() + " two faces",
                          split_face(m, 0, 0, std::min(2, L - 1), std::make_pair(0.4 * s.area, 0.6 * s.area)).fine);
        cons.push_back(GConstraints::from_spec(s));
      }
    }
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& m = maps[i].second;
    auto tg = tame_generators(m);
    auto brute = marginal_generators(m, cons[i], tg.basis(), cfg.group, &k.test, false, cfg.cap);
    auto closed = tame_closed_form(m, tg, cons[i], k.ref);
    r.cases.push_back(detail::make_case(maps[i].first, brute.p, closed.p, cfg.tol));
  }
  return r;
}

/// Holonomy-field law of the tame generators against the character-free
/// monodromy law of the Poisson-ramified covering.
inline SuiteReport suite_holo_mono(const SuiteConfig& cfg) {
  SuiteReport r{"holo-mono", cfg.tol, {}, {}};
  auto k = detail::kernels(cfg);
  std::vector<std::pair<std::string, std::pair<RibbonMap, GConstraints>>> items;
  if (cfg.map) {
    if (cfg.map->boundary_count() > 0 && !cfg.surface) throw InputError("holo-mono: a map with boundary needs --surface for its classes");
    RibbonMap m = cfg.map->has_areas() ? *cfg.map : cfg.map->with_proportional_areas(cfg.time);
    items.push_back({"given map", {m, cfg.surface ? GConstraints::from_spec(*cfg.surface) : GConstraints{}}});
  } else {
    for (const auto& s : detail::default_surfaces(cfg, false)) {
      if (!s.orientable && !cfg.pi.inversion_invariant()) {
        r.notes.push_back(s.describe() + " skipped: jump measure not inversion-invariant");
        continue;
      }
      items.push_back({s.describe(), {standard_map(s), GConstraints::from_spec(s)}});
    }
  }
  for (const auto& [name, mc] : items) {
    auto tg = tame_generators(mc.first);
    auto hf = marginal_generators(mc.first, mc.second, tg.basis(), cfg.group, &k.test, false, cfg.cap);
    auto mf = monodromy_marginal(mc.first, tg, mc.second, cfg.pi, cfg.tail_tol);
    r.cases.push_back(detail::make_case(name, hf.p, mf.pmf.p, cfg.tol));
    r.notes.push_back(name + ": Poisson tail bound " + std::to_string(mf.tail_bound));
  }
  return r;
}

/// Counting formula (exact) and covering mass against the partition function.
inline SuiteReport suite_counting(const SuiteConfig& cfg) {
  SuiteReport r{"counting", cfg.tol, {}, {}};
  auto k = detail::kernels(cfg);
  const GroupPtr& g = cfg.group;
  std::vector<SurfaceSpec> specs;
  if (cfg.surface) {
    specs.push_back(*cfg.surface);
    specs.back().area = cfg.time;
  } else {
    specs = {{true, 0, {}, cfg.time}, {true, 2, {}, cfg.time}};
  }
  const std::function<Rational(const MonodromyTuple&)> one = [](const MonodromyTuple&) { return Rational(1); };
  const std::function<Rational(const MonodromyTuple&)> span = [&](const MonodromyTuple& t) {
    auto e = t.entries();
    return Rational(static_cast<long long>(g->generated_subgroup(e).size()));
  };
  for (const auto& s : specs) {
    for (int kk = 0; kk <= 3; ++kk) {
      for (const auto& [fname, f] : {std::pair{std::string("f=1"), one}, std::pair{std::string("f=|<tuple>|"), span}}) {
        auto rep = counting_check(g, s, kk, f, cfg.cap);
        auto c = detail::make_case(s.describe() + " k=" + std::to_string(kk) + " " + fname + " (exact)",
                                   {to_double(rep.lhs)}, {to_double(rep.rhs)}, 0.0);
        c.pass = rep.equal();
        r.cases.push_back(c);
      }
    }
    if (!s.orientable && !cfg.pi.inversion_invariant()) continue;
    auto mass = bb_mass_integrated(k.test.jump(), s, cfg.tail_tol, cfg.cap);
    r.cases.push_back(detail::make_case(s.describe() + " covering mass vs partition function", {mass.mass},
                                        {partition_formula(s, k.ref)}, cfg.tol));
  }
  return r;
}

inline SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (name == "surgery") return suite_surgery(cfg);
  if (name == "semigroup") return suite_semigroup(cfg);
  if (name == "kappa-eta") return suite_kappa_eta(cfg);
  if (name == "subdivision") return suite_subdivision(cfg);
  if (name == "tame") return suite_tame(cfg);
  if (name == "holo-mono") return suite_holo_mono(cfg);
  if (name == "counting") return suite_counting(cfg);
  throw InputError("unknown suite \"" + name + "\"");
}

}  // namespace mhf
