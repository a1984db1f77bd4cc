#pragma once

// Ramified G-bundles as monodromy tuples: enumeration, automorphisms, the
// counting formula, masses of the Poisson-ramified bundle measures and the
// character-free computation of their generator marginals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

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

/// Elements (a₁..a_g, c₁..c_p, d₁..d_k) with c_i in the i-th boundary class,
/// d_i ≠ 1 and w(a)·c₁⋯c_p·d₁⋯d_k = 1, where w is [a₁,a₂]⋯[a_{g−1},a_g]
/// (orientable) or a₁²⋯a_g² (non-orientable).
struct MonodromyTuple {
  bool orientable = true;
  int genus = 0;
  std::vector<int> boundary_classes;
  std::vector<Element> a, c, d;

  int k() const noexcept { return static_cast<int>(d.size()); }
  std::vector<Element> entries() const {
    std::vector<Element> all = a;
    all.insert(all.end(), c.begin(), c.end());
    all.insert(all.end(), d.begin(), d.end());
    return all;
  }
};

/// Value of the surface word on a.
inline Element surface_word_value(const FiniteGroup& g, bool orientable, const std::vector<Element>& a) {
  Element w = g.identity();
  if (orientable) {
    if (a.size() % 2 != 0) throw InputError("surface word: orientable surfaces need an even number of a-letters");
    for (std::size_t i = 0; i < a.size(); i += 2) w = g.mul(w, g.commutator(a[i], a[i + 1]));
  } else {
    for (Element x : a) w = g.mul(w, g.mul(x, x));
  }
  return w;
}

inline bool satisfies_relation(const FiniteGroup& g, const MonodromyTuple& t) {
  if (t.a.size() != static_cast<std::size_t>(t.genus) || t.c.size() != t.boundary_classes.size()) return false;
  for (std::size_t i = 0; i < t.c.size(); ++i)
    if (g.class_of(t.c[i]) != t.boundary_classes[i]) return false;
  for (Element x : t.d)
    if (x == g.identity()) return false;
  Element r = surface_word_value(g, t.orientable, t.a);
  for (Element x : t.c) r = g.mul(r, x);
  for (Element x : t.d) r = g.mul(r, x);
  return r == g.identity();
}

/// Π-weight ∏ Π₁({d_i}).
inline double pi_weight(const JumpMeasure& pi, const MonodromyTuple& t) {
  double w = 1.0;
  const double total = pi.total_rate();
  for (Element x : t.d) w *= total > 0.0 ? pi(x) / total : 0.0;
  return w;
}

/// Order of the centralizer of the subgroup generated by the tuple entries.
inline int aut_order(const FiniteGroup& g, const MonodromyTuple& t) {
  auto all = t.entries();
  return static_cast<int>(g.centralizer(all).size());
}

/// All tuples of H(spec, k) in lexicographic order of (a, c, d).
inline std::vector<MonodromyTuple> enumerate_H(const GroupPtr& gp, const SurfaceSpec& s, int k, double cap = kDefaultCap) {
  s.validate(gp.get());
  if (k < 0) throw InputError("enumeration: k must be non-negative");
  const FiniteGroup& g = *gp;
  const auto& cls = g.classes();
  std::vector<std::vector<Element>> ranges;
  for (int i = 0; i < s.genus; ++i) {
    std::vector<Element> all(g.order());
    for (Element x = 0; x < g.size(); ++x) all[static_cast<std::size_t>(x)] = x;
    ranges.push_back(std::move(all));
  }
  for (int c : s.boundary_classes) ranges.push_back(cls.members[static_cast<std::size_t>(c)]);
  std::vector<Element> nonid;
  for (Element x = 1; x < g.size(); ++x) nonid.push_back(x);
  for (int i = 0; i + 1 < k; ++i) ranges.push_back(nonid);
  long double count = 1.0L;
  for (const auto& r : ranges) count *= static_cast<long double>(r.size());
  if (count > static_cast<long double>(cap)) {
    throw CapExceeded("enumeration needs " + std::to_string(static_cast<double>(count)) + " candidates, above the cap");
  }
  std::vector<MonodromyTuple> out;
  for (const auto& r : ranges)
    if (r.empty()) return out;
  const std::size_t na = static_cast<std::size_t>(s.genus), nc = s.boundary_classes.size();
  std::vector<std::size_t> idx(ranges.size(), 0);
  while (true) {
    MonodromyTuple t{s.orientable, s.genus, s.boundary_classes, {}, {}, {}};
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      Element x = ranges[i][idx[i]];
      if (i < na)
        t.a.push_back(x);
      else if (i < na + nc)
        t.c.push_back(x);
      else
        t.d.push_back(x);
    }
    Element r = surface_word_value(g, s.orientable, t.a);
    for (Element x : t.c) r = g.mul(r, x);
    for (Element x : t.d) r = g.mul(r, x);
    if (k == 0) {
      if (r == g.identity()) out.push_back(std::move(t));
    } else if (r != g.identity()) {
      t.d.push_back(g.inv(r));
      out.push_back(std::move(t));
    }
    std::size_t pos = ranges.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < ranges[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
    if (ranges.empty()) return out;
  }
}

/// Simultaneous conjugation of every entry.
inline MonodromyTuple conjugate_tuple(const FiniteGroup& g, const MonodromyTuple& t, Element x) {
  MonodromyTuple r = t;
  for (auto* v : {&r.a, &r.c, &r.d})
    for (auto& e : *v) e = g.conjugate(x, e);
  return r;
}

struct CountingReport {
  Rational lhs = 0;  // Σ over orbits f / |Aut|
  Rational rhs = 0;  // (1/n) Σ_H f
  std::size_t tuples = 0;
  std::size_t orbits = 0;
  bool equal() const { return lhs == rhs; }
};

/// Both sides of Σ_R f(R)/|Aut R| = (1/n) Σ_{h∈H} f(h), the left one by
/// decomposing H into simultaneous-conjugation orbits. Throws InputError if f
/// is not constant on an orbit.
inline CountingReport counting_check(const GroupPtr& gp, const SurfaceSpec& s, int k,
                                     const std::function<Rational(const MonodromyTuple&)>& f, double cap = kDefaultCap) {
  const FiniteGroup& g = *gp;
  auto H = enumerate_H(gp, s, k, cap);
  CountingReport rep;
  rep.tuples = H.size();
  std::map<std::vector<Element>, std::size_t> where;
  for (std::size_t i = 0; i < H.size(); ++i) where.emplace(H[i].entries(), i);
  std::vector<char> seen(H.size(), 0);
  for (std::size_t i = 0; i < H.size(); ++i) {
    rep.rhs += f(H[i]);
    if (seen[i]) continue;
    ++rep.orbits;
    const Rational fi = f(H[i]);
    std::size_t orbit = 0;
    for (Element x = 0; x < g.size(); ++x) {
      auto it = where.find(conjugate_tuple(g, H[i], x).entries());
      if (it == where.end()) throw NumericalError("counting: H is not closed under conjugation");
      if (!seen[it->second]) {
        seen[it->second] = 1;
        ++orbit;
        if (f(H[it->second]) != fi) throw InputError("counting: the functional is not conjugation-invariant");
      }
    }
    const int aut = aut_order(g, H[i]);
    if (orbit * static_cast<std::size_t>(aut) != g.order()) throw NumericalError("counting: orbit-stabilizer mismatch");
    rep.lhs += fi / Rational(aut);
  }
  rep.rhs /= Rational(static_cast<long long>(g.order()));
  return rep;
}

namespace detail {

inline void require_covering_admissible(const JumpMeasure& pi, bool orientable) {
  if (!orientable && !pi.inversion_invariant()) {
    throw InputError("covering: non-orientable surfaces need an inversion-invariant jump measure");
  }
}

inline double boundary_prefactor(const FiniteGroup& g, const std::vector<int>& classes, int genus) {
  double p = std::pow(static_cast<double>(g.order()), 1 - genus);
  for (int c : classes) p /= static_cast<double>(g.classes().size[static_cast<std::size_t>(c)]);
  return p;
}

// Calls f(x) for each value x = w(a)c₁⋯c_p over all a ∈ G^g and c_i ∈ O_i.
template <class F>
void for_each_surface_value(const FiniteGroup& g, const SurfaceSpec& s, double cap, F&& f) {
  long double count = std::pow(static_cast<long double>(g.order()), s.genus);
  for (int c : s.boundary_classes) count *= static_cast<long double>(g.classes().size[static_cast<std::size_t>(c)]);
  if (count > static_cast<long double>(cap)) throw CapExceeded("covering mass: summation above the cap");
  MonodromyTuple t{s.orientable, s.genus, s.boundary_classes, {}, {}, {}};
  std::vector<std::vector<Element>> ranges;
  for (int i = 0; i < s.genus; ++i) {
    std::vector<Element> all;
    for (Element x = 0; x < g.size(); ++x) all.push_back(x);
    ranges.push_back(std::move(all));
  }
  for (int c : s.boundary_classes) ranges.push_back(g.classes().members[static_cast<std::size_t>(c)]);
  std::vector<std::size_t> idx(ranges.size(), 0);
  std::vector<Element> a(static_cast<std::size_t>(s.genus));
  while (true) {
    for (int i = 0; i < s.genus; ++i) a[static_cast<std::size_t>(i)] = ranges[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
    Element x = surface_word_value(g, s.orientable, a);
    for (std::size_t i = static_cast<std::size_t>(s.genus); i < ranges.size(); ++i) x = g.mul(x, ranges[i][idx[i]]);
    f(x);
    std::size_t pos = ranges.size();
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < ranges[pos].size()) {
        done = false;
        break;
      }
      idx[pos] = 0;
    }
    if (done) return;
  }
}

}  // namespace detail

/// Fixed-k mass (n^{1−g}/∏|O_i|) Σ_{h∈H} ∏ Π₁({d_i}) by enumeration.
inline double bb_mass(const JumpMeasure& pi, const SurfaceSpec& s, int k, double cap = kDefaultCap) {
  detail::require_covering_admissible(pi, s.orientable);
  const GroupPtr& gp = pi.group();
  double sum = 0.0;
  for (const auto& t : enumerate_H(gp, s, k, cap)) sum += pi_weight(pi, t);
  return detail::boundary_prefactor(*gp, s.boundary_classes, s.genus) * sum;
}

struct IntegratedMass {
  double mass = 0.0;
  PoissonTruncation truncation;
};

/// Mass of the Poisson-ramified measure of area s.area: the Poisson average
/// of the fixed-k masses, evaluated as (n^{1−g}/∏|O_i|) Σ_{a,c} S((w(a)c)⁻¹)
/// with S the truncated Poisson mixture of convolution powers of Π₁.
inline IntegratedMass bb_mass_integrated(const JumpMeasure& pi, const SurfaceSpec& s, double tail_tol = kDefaultTailTol,
                                         double cap = kDefaultCap) {
  s.validate(pi.group().get());
  detail::require_covering_admissible(pi, s.orientable);
  const FiniteGroup& g = pi.G();
  auto mix = poisson_mixture(pi, s.area, tail_tol);
  double sum = 0.0;
  detail::for_each_surface_value(g, s, cap, [&](Element x) { sum += mix.law(g.inv(x)); });
  return {detail::boundary_prefactor(g, s.boundary_classes, s.genus) * sum, mix.truncation};
}

/// Exact pmf of the tame-generator values (a, c, l₁..l_{f−1}) under the
/// Poisson-ramified covering measure: per face the truncated Poisson mixture
/// of convolution powers of Π₁ at the facial monodromy, times the uniform and
/// boundary prefactors. Uses no heat kernel and no characters.
struct MonodromyMarginal {
  GeneratorPmf pmf;
  std::vector<PoissonTruncation> truncations;  // per face
  double tail_bound = 0.0;                     // Σ of the per-face tails
};

inline MonodromyMarginal monodromy_marginal(const RibbonMap& m, const TameGenerators& tg, const GConstraints& c,
                                            const JumpMeasure& pi, double tail_tol = kDefaultTailTol) {
  if (!m.has_areas()) throw InputError("monodromy marginal: face areas are not assigned");
  detail::require_covering_admissible(pi, m.orientable());
  const GroupPtr& gp = pi.group();
  const FiniteGroup& g = *gp;
  const int n = g.size();
  const int na = static_cast<int>(tg.a.size()), nc = static_cast<int>(tg.c.size()), nl = static_cast<int>(tg.l.size());
  MonodromyMarginal out;
  std::vector<MeasureD> laws;
  for (int i = 0; i < nl; ++i) {
    auto mix = poisson_mixture(pi, m.area(tg.face_of_l[static_cast<std::size_t>(i)]), tail_tol);
    out.tail_bound += mix.truncation.tail_bound;
    out.truncations.push_back(mix.truncation);
    laws.push_back(std::move(mix.law));
  }
  auto cls = boundary_generator_classes(g, tg, c);
  GeneratorPmf& r = out.pmf;
  r.k = na + nc + nl - 1;
  r.n = n;
  r.p.assign(detail::pmf_size(n, r.k), 0.0);
  const double prefactor = detail::boundary_prefactor(g, cls, na);
  for (std::size_t i = 0; i < r.p.size(); ++i) {
    auto xs = r.values_at(i);
    std::vector<Element> a(xs.begin(), xs.begin() + na);
    std::vector<Element> cv(xs.begin() + na, xs.begin() + na + nc);
    std::vector<Element> lh(xs.begin() + na + nc, xs.end());
    bool ok = true;
    for (int j = 0; j < nc; ++j)
      if (g.class_of(cv[static_cast<std::size_t>(j)]) != cls[static_cast<std::size_t>(j)]) ok = false;
    if (!ok) continue;
    double v = prefactor;
    for (int j = 0; j + 1 < nl; ++j) v *= laws[static_cast<std::size_t>(j)](lh[static_cast<std::size_t>(j)]);
    v *= laws[static_cast<std::size_t>(nl - 1)](last_facial_holonomy(g, tg, a, cv, lh));
    r.p[i] = v;
  }
  r.total = std::accumulate(r.p.begin(), r.p.end(), 0.0);
  return out;
}

struct HoloMonoReport {
  GeneratorPmf hf;  // holonomy field, by summation with the heat kernel
  GeneratorPmf mf;  // covering measure, by Poisson series
  double max_abs_diff = 0.0;
  double tail_bound = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Compares the joint law of the tame-generator holonomies under the
/// holonomy field with the monodromy law of the Poisson-ramified covering.
inline HoloMonoReport verify_holo_mono(const RibbonMap& m, const GConstraints& c, const HeatKernel& q, double tol = 1e-9,
                                       double tail_tol = kDefaultTailTol, double cap = kDefaultCap) {
  auto tg = tame_generators(m);
  HoloMonoReport rep;
  rep.hf = marginal_generators(m, c, tg.basis(), q.group(), &q, false, cap);
  auto mm = monodromy_marginal(m, tg, c, q.jump(), tail_tol);
  rep.mf = std::move(mm.pmf);
  rep.tail_bound = mm.tail_bound;
  rep.max_abs_diff = rep.hf.max_abs_diff(rep.mf);
  rep.tol = tol;
  rep.pass = rep.max_abs_diff <= tol;
  return rep;
}

/// Draws per sample before giving up (acceptance below 1e−6).
inline constexpr long kMaxCoveringAttempts = 1000000;

struct CoveringSample {
  std::vector<int> counts;  // ramification points per face (one entry for a whole surface)
  MonodromyTuple tuple;
  std::vector<Element> facial;  // product of the d's of each face (map version)
  long attempts = 0;
};

namespace detail {

inline Element draw_from(const std::vector<double>& cdf, const std::vector<Element>& support, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, cdf.back());
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u(rng));
  if (it == cdf.end()) --it;
  return support[static_cast<std::size_t>(it - cdf.begin())];
}

struct JumpSampler {
  std::vector<double> cdf;
  std::vector<Element> support;
  explicit JumpSampler(const JumpMeasure& pi) {
    for (Element x = 0; x < pi.G().size(); ++x) {
      if (pi(x) > 0.0) {
        support.push_back(x);
        cdf.push_back((cdf.empty() ? 0.0 : cdf.back()) + pi(x));
      }
    }
    if (support.empty()) throw InputError("covering sampler: the jump measure is zero");
  }
  Element operator()(std::mt19937_64& rng) const { return draw_from(cdf, support, rng); }
};

inline Element uniform_in(const std::vector<Element>& xs, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  return xs[pick(rng)];
}

}  // namespace detail

/// Sampler of the normalized Poisson-ramified covering measure on a surface.
/// Each attempt draws k ~ Poisson(Π(G)·area), a uniform, c_i uniform in their
/// classes and d_i i.i.d. Π₁; the attempt is kept iff the relation holds.
class CoveringSampler {
 public:
  CoveringSampler(const JumpMeasure& pi, const SurfaceSpec& s, std::uint64_t seed)
      : pi_(pi), s_(s), jumps_(pi), rng_(seed), poisson_(pi.total_rate() * s.area) {
    s.validate(pi.group().get());
    auto rep = check_admissible(pi, !s.orientable);
    if (!rep.admissible) throw InputError("covering sampler: the jump measure is not admissible");
  }

  CoveringSample sample() {
    const FiniteGroup& g = pi_.G();
    std::vector<Element> all;
    for (Element x = 0; x < g.size(); ++x) all.push_back(x);
    CoveringSample out;
    for (long att = 1; att <= kMaxCoveringAttempts; ++att) {
      MonodromyTuple t{s_.orientable, s_.genus, s_.boundary_classes, {}, {}, {}};
      int k = poisson_(rng_);
      for (int i = 0; i < s_.genus; ++i) t.a.push_back(detail::uniform_in(all, rng_));
      for (int c : s_.boundary_classes) t.c.push_back(detail::uniform_in(g.classes().members[static_cast<std::size_t>(c)], rng_));
      for (int i = 0; i < k; ++i) t.d.push_back(jumps_(rng_));
      if (satisfies_relation(g, t)) {
        out.counts = {k};
        out.tuple = std::move(t);
        out.attempts = att;
        total_attempts_ += att;
        ++accepted_;
        return out;
      }
    }
    throw NumericalError("covering sampler: acceptance below 1e-6 after " + std::to_string(kMaxCoveringAttempts) + " draws");
  }

  double acceptance_rate() const { return total_attempts_ ? static_cast<double>(accepted_) / total_attempts_ : 0.0; }

 private:
  JumpMeasure pi_;
  SurfaceSpec s_;
  detail::JumpSampler jumps_;
  std::mt19937_64 rng_;
  std::poisson_distribution<int> poisson_;
  long total_attempts_ = 0;
  long accepted_ = 0;
};

/// Sampler of the covering measure on a map with areas, recording per-face
/// ramification counts and facial monodromies (relative to the tame
/// generators of the map). Each attempt draws the a's uniformly, the c's
/// class-uniformly and, per face, k_i ~ Poisson(Π(G)·area) jumps; it is kept
/// iff the last facial monodromy agrees with the one forced by the relation.
class MapCoveringSampler {
 public:
  MapCoveringSampler(const RibbonMap& m, const GConstraints& c, const JumpMeasure& pi, std::uint64_t seed)
      : tg_(tame_generators(m)), pi_(pi), jumps_(pi), rng_(seed) {
    if (!m.has_areas()) throw InputError("covering sampler: face areas are not assigned");
    auto rep = check_admissible(pi, !m.orientable());
    if (!rep.admissible) throw InputError("covering sampler: the jump measure is not admissible");
    cls_ = boundary_generator_classes(pi.G(), tg_, c);
    for (std::size_t i = 0; i < tg_.l.size(); ++i) {
      poisson_.emplace_back(pi.total_rate() * m.area(tg_.face_of_l[i]));
    }
  }

  const TameGenerators& generators() const noexcept { return tg_; }

  CoveringSample sample() {
    const FiniteGroup& g = pi_.G();
    std::vector<Element> all;
    for (Element x = 0; x < g.size(); ++x) all.push_back(x);
    for (long att = 1; att <= kMaxCoveringAttempts; ++att) {
      CoveringSample out;
      out.tuple.orientable = true;
      for (std::size_t i = 0; i < tg_.a.size(); ++i) out.tuple.a.push_back(detail::uniform_in(all, rng_));
      for (int cl : cls_) out.tuple.c.push_back(detail::uniform_in(g.classes().members[static_cast<std::size_t>(cl)], rng_));
      for (auto& pd : poisson_) {
        int k = pd(rng_);
        Element prod = g.identity();
        for (int j = 0; j < k; ++j) {
          Element x = jumps_(rng_);
          out.tuple.d.push_back(x);
          prod = g.mul(x, prod);
        }
        out.counts.push_back(k);
        out.facial.push_back(prod);
      }
      std::vector<Element> head(out.facial.begin(), out.facial.end() - 1);
      if (last_facial_holonomy(g, tg_, out.tuple.a, out.tuple.c, head) == out.facial.back()) {
        out.attempts = att;
        return out;
      }
    }
    throw NumericalError("covering sampler: acceptance below 1e-6 after " + std::to_string(kMaxCoveringAttempts) + " draws");
  }

 private:
  TameGenerators tg_;
  JumpMeasure pi_;
  detail::JumpSampler jumps_;
  std::mt19937_64 rng_;
  std::vector<int> cls_;
  std::vector<std::poisson_distribution<int>> poisson_;
};

}  // namespace mhf
