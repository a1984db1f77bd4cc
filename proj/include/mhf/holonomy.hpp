#pragma once

// Uniform measures with G-constraints on the edge configurations of a map,
// the discrete holonomy-field weight, partition functions (by summation and
// by closed formula), surgery operators on class functions and exact
// marginals of generator holonomies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mhf/characters.hpp"
#include "mhf/error.hpp"
#include "mhf/group.hpp"
#include "mhf/levy.hpp"
#include "mhf/loops.hpp"
#include "mhf/measure.hpp"
#include "mhf/ribbon_map.hpp"
#include "mhf/surface.hpp"

namespace mhf {

inline constexpr double kDefaultCap = 1e8;

/// A closed, edge-simple cycle of darts whose holonomy is constrained to a
/// conjugacy class.
struct MarkedCycle {
  std::vector<int> darts;
  int cls = 0;
};

/// Class constraints on boundary circuits (as listed in the map) and on marks.
struct GConstraints {
  std::vector<int> boundary;
  std::vector<MarkedCycle> marks;

  static GConstraints from_spec(const SurfaceSpec& s) { return {s.boundary_classes, {}}; }
};

/// The uniform measure with G-constraints, parametrized by independent slots:
/// one uniform group element per unconstrained edge and, on each constrained
/// cycle of L edges, L−1 uniform elements and a class-uniform element y, the
/// last edge being forced so that the cycle holonomy is y.
class ConstrainedSpace {
 public:
  struct Cycle {
    std::vector<int> darts;
    int cls = 0;
    std::vector<int> slots;  // slots of the first L−1 edges, then the y slot
  };

  ConstrainedSpace(GroupPtr g, const RibbonMap& m, const GConstraints& c) : g_(std::move(g)), m_(&m) {
    if (c.boundary.size() != static_cast<std::size_t>(m.boundary_count())) {
      throw InputError("constraints: expected " + std::to_string(m.boundary_count()) + " boundary classes, got " +
                       std::to_string(c.boundary.size()));
    }
    std::vector<MarkedCycle> all;
    for (std::size_t i = 0; i < c.boundary.size(); ++i) all.push_back({m.boundary()[i], c.boundary[i]});
    all.insert(all.end(), c.marks.begin(), c.marks.end());

    std::vector<int> owner(static_cast<std::size_t>(m.edge_count()), -1);
    for (std::size_t k = 0; k < all.size(); ++k) {
      const auto& mc = all[k];
      if (mc.cls < 0 || mc.cls >= g_->class_count()) throw InputError("constraints: class index out of range");
      if (mc.darts.empty()) throw InputError("constraints: empty cycle");
      check_path(m, EdgeWord{m.tail(mc.darts[0]), mc.darts});
      if (m.head(mc.darts.back()) != m.tail(mc.darts[0])) throw InputError("constraints: a marked cycle is not closed");
      for (int d : mc.darts) {
        int e = m.edge_of(d);
        if (owner[static_cast<std::size_t>(e)] >= 0) {
          throw InputError("constraints: constrained cycles overlap on edge " + std::to_string(e));
        }
        owner[static_cast<std::size_t>(e)] = static_cast<int>(k);
      }
    }
    std::vector<Element> all_elements(g_->order());
    std::iota(all_elements.begin(), all_elements.end(), 0);
    edge_slot_.assign(static_cast<std::size_t>(m.edge_count()), -1);
    for (int e = 0; e < m.edge_count(); ++e) {
      if (owner[static_cast<std::size_t>(e)] < 0) {
        edge_slot_[static_cast<std::size_t>(e)] = static_cast<int>(slots_.size());
        slots_.push_back(all_elements);
      }
    }
    for (const auto& mc : all) {
      Cycle cy{mc.darts, mc.cls, {}};
      for (std::size_t i = 0; i + 1 < mc.darts.size(); ++i) {
        cy.slots.push_back(static_cast<int>(slots_.size()));
        edge_slot_[static_cast<std::size_t>(m.edge_of(mc.darts[i]))] = static_cast<int>(slots_.size());
        slots_.push_back(all_elements);
      }
      cy.slots.push_back(static_cast<int>(slots_.size()));
      slots_.push_back(g_->classes().members[static_cast<std::size_t>(mc.cls)]);
      cycles_.push_back(std::move(cy));
    }
    size_ = 1.0L;
    for (const auto& s : slots_) size_ *= static_cast<long double>(s.size());
  }

  const FiniteGroup& G() const noexcept { return *g_; }
  const GroupPtr& group() const noexcept { return g_; }
  const RibbonMap& map() const noexcept { return *m_; }
  std::size_t slot_count() const noexcept { return slots_.size(); }
  const std::vector<Element>& slot_values(std::size_t i) const { return slots_.at(i); }
  const std::vector<Cycle>& cycles() const noexcept { return cycles_; }
  /// Number of slot tuples (each of probability 1/size()).
  long double size() const noexcept { return size_; }

  void check_cap(double cap) const {
    if (size_ > static_cast<long double>(cap)) {
      throw CapExceeded("brute-force summation needs " + std::to_string(static_cast<double>(size_)) +
                        " evaluations, above the cap of " + std::to_string(cap));
    }
  }

  /// Edge configuration from slot value indices.
  HolonomyConfig config(const std::vector<int>& idx) const {
    HolonomyConfig h(static_cast<std::size_t>(m_->edge_count()), 0);
    for (int e = 0; e < m_->edge_count(); ++e) {
      int s = edge_slot_[static_cast<std::size_t>(e)];
      if (s >= 0) h[static_cast<std::size_t>(e)] = slots_[static_cast<std::size_t>(s)][static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
    }
    const FiniteGroup& g = *g_;
    for (const auto& cy : cycles_) {
      Element p = g.identity();
      const std::size_t L = cy.darts.size();
      for (std::size_t i = 0; i + 1 < L; ++i) {
        int d = cy.darts[i];
        Element x = h[static_cast<std::size_t>(m_->edge_of(d))];
        p = g.mul(m_->is_positive(d) ? x : g.inv(x), p);
      }
      int ys = cy.slots.back();
      Element y = slots_[static_cast<std::size_t>(ys)][static_cast<std::size_t>(idx[static_cast<std::size_t>(ys)])];
      Element last = g.mul(y, g.inv(p));
      int d = cy.darts.back();
      h[static_cast<std::size_t>(m_->edge_of(d))] = m_->is_positive(d) ? last : g.inv(last);
    }
    return h;
  }

  /// Calls f(config, slot indices) on every slot tuple.
  template <class F>
  void for_each(F&& f, double cap = kDefaultCap) const {
    check_cap(cap);
    std::vector<int> idx(slots_.size(), 0);
    while (true) {
      f(config(idx), idx);
      std::size_t k = 0;
      for (; k < idx.size(); ++k) {
        if (++idx[k] < static_cast<int>(slots_[k].size())) break;
        idx[k] = 0;
      }
      if (k == idx.size()) break;
    }
  }

  std::vector<int> sample_indices(std::mt19937_64& rng) const {
    std::vector<int> idx(slots_.size());
    for (std::size_t k = 0; k < slots_.size(); ++k) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(slots_[k].size()) - 1);
      idx[k] = pick(rng);
    }
    return idx;
  }

 private:
  GroupPtr g_;
  const RibbonMap* m_;
  std::vector<std::vector<Element>> slots_;
  std::vector<int> edge_slot_;
  std::vector<Cycle> cycles_;
  long double size_ = 1.0L;
};

/// Seeded sample of the uniform measure with G-constraints.
inline HolonomyConfig sample_uniform_constrained(const GroupPtr& g, const RibbonMap& m, const GConstraints& c,
                                                 std::uint64_t seed) {
  ConstrainedSpace sp(g, m, c);
  std::mt19937_64 rng(seed);
  return sp.config(sp.sample_indices(rng));
}

/// Exact expectation of f under the uniform measure with G-constraints.
inline double uniform_constrained_mass(const GroupPtr& g, const RibbonMap& m, const GConstraints& c,
                                       const std::function<double(const HolonomyConfig&)>& f,
                                       double cap = kDefaultCap) {
  ConstrainedSpace sp(g, m, c);
  double s = 0.0;
  sp.for_each([&](const HolonomyConfig& h, const std::vector<int>&) { s += f(h); }, cap);
  return s / static_cast<double>(sp.size());
}

/// Gauge action h(e) ↦ j(head)⁻¹ h(e) j(tail) on positive darts.
inline HolonomyConfig gauge_transform(const FiniteGroup& g, const RibbonMap& m, const HolonomyConfig& h,
                                      const std::vector<Element>& j) {
  if (j.size() != static_cast<std::size_t>(m.vertex_count())) throw InputError("gauge: one element per vertex expected");
  HolonomyConfig out(h.size());
  for (int e = 0; e < m.edge_count(); ++e) {
    int d = m.positive_dart(e);
    out[static_cast<std::size_t>(e)] =
        g.mul(g.mul(g.inv(j[static_cast<std::size_t>(m.head(d))]), h[static_cast<std::size_t>(e)]), j[static_cast<std::size_t>(m.tail(d))]);
  }
  return out;
}

/// ∏_F Q_{area(F)}(h(∂F)) with the kernel tabulated once per face.
class DfWeight {
 public:
  DfWeight(const RibbonMap& m, const HeatKernel& q) : m_(&m), g_(q.group()) {
    if (!m.has_areas()) throw InputError("holonomy field: face areas are not assigned");
    if (!m.orientable() && !q.jump().inversion_invariant()) {
      throw InputError("holonomy field: non-orientable maps need an inversion-invariant jump measure");
    }
    for (int f = 0; f < m.face_count(); ++f) kernels_.push_back(q.at(m.area(f)).values());
  }

  const std::vector<double>& kernel(int face) const { return kernels_.at(static_cast<std::size_t>(face)); }

  double face_factor(const HolonomyConfig& h, int f) const {
    Element x = holonomy_of_cycle(*g_, *m_, h, m_->faces().cycles[static_cast<std::size_t>(f)]);
    return kernels_[static_cast<std::size_t>(f)][static_cast<std::size_t>(x)];
  }

  double operator()(const HolonomyConfig& h) const {
    double w = 1.0;
    for (int f = 0; f < m_->face_count(); ++f) w *= face_factor(h, f);
    return w;
  }

 private:
  const RibbonMap* m_;
  GroupPtr g_;
  std::vector<std::vector<double>> kernels_;
};

inline double df_weight(const HolonomyConfig& h, const RibbonMap& m, const HeatKernel& q) { return DfWeight(m, q)(h); }

/// Total mass of the discrete holonomy field on the map, by summation.
inline double partition_graph(const RibbonMap& m, const GConstraints& c, const HeatKernel& q, double cap = kDefaultCap) {
  DfWeight w(m, q);
  return uniform_constrained_mass(q.group(), m, c, [&](const HolonomyConfig& h) { return w(h); }, cap);
}

/// m = η^{∗g/2} ∗ δ_{O₁} ∗ … ∗ δ_{O_p} (orientable) or κ^{∗g} ∗ δ_{O₁} ∗ … .
inline MeasureQ measure_m(const GroupPtr& g, const SurfaceSpec& s) {
  s.validate(g.get());
  MeasureQ m = s.orientable ? convolution_power(eta_measure(g), s.genus / 2) : convolution_power(kappa_measure(g), s.genus);
  for (int c : s.boundary_classes) m = convolve(m, delta_class(g, c));
  return m;
}

namespace detail {

inline void require_admissible(const HeatKernel& q, bool orientable) {
  auto rep = check_admissible(q.jump(), !orientable);
  if (!rep.generates) throw InputError("partition function: the jump measure is not admissible (its support does not generate G)");
  if (!rep.admissible) throw InputError("partition function: non-orientable surfaces need an inversion-invariant jump measure");
}

}  // namespace detail

/// Z = Σ_x Q_t(x) m({x}).
inline double partition_formula(const SurfaceSpec& s, const HeatKernel& q) {
  detail::require_admissible(q, s.orientable);
  MeasureD m = measure_m(q.group(), s).to_double();
  ClassDensity qt = q.at(s.area);
  double z = 0.0;
  for (Element x = 0; x < q.group()->size(); ++x) z += qt(x) * m(x);
  return z;
}

/// Function on Conj(G)^p stored densely; the first argument is the most
/// significant digit of the index.
class SymmetricClassFunction {
 public:
  SymmetricClassFunction() = default;
  SymmetricClassFunction(GroupPtr g, int arity) : g_(std::move(g)), arity_(arity) {
    if (arity < 0) throw InputError("class function: negative arity");
    std::size_t n = 1;
    for (int i = 0; i < arity; ++i) n *= static_cast<std::size_t>(g_->class_count());
    v_.assign(n, 0.0);
  }

  const GroupPtr& group() const noexcept { return g_; }
  int arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return v_.size(); }
  const std::vector<double>& values() const noexcept { return v_; }

  std::size_t index(const std::vector<int>& classes) const {
    if (classes.size() != static_cast<std::size_t>(arity_)) throw InputError("class function: wrong number of arguments");
    std::size_t i = 0;
    for (int c : classes) i = i * static_cast<std::size_t>(g_->class_count()) + static_cast<std::size_t>(c);
    return i;
  }
  std::vector<int> classes_at(std::size_t i) const {
    std::vector<int> c(static_cast<std::size_t>(arity_));
    const auto r = static_cast<std::size_t>(g_->class_count());
    for (int k = arity_ - 1; k >= 0; --k) {
      c[static_cast<std::size_t>(k)] = static_cast<int>(i % r);
      i /= r;
    }
    return c;
  }
  double operator()(const std::vector<int>& classes) const { return v_[index(classes)]; }
  double& at(const std::vector<int>& classes) { return v_[index(classes)]; }
  double& at_index(std::size_t i) { return v_.at(i); }

  /// Largest change under swapping two arguments.
  double symmetry_defect() const {
    double d = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      auto c = classes_at(i);
      for (int a = 0; a < arity_; ++a) {
        for (int b = a + 1; b < arity_; ++b) {
          auto c2 = c;
          std::swap(c2[static_cast<std::size_t>(a)], c2[static_cast<std::size_t>(b)]);
          d = std::max(d, std::abs(v_[i] - v_[index(c2)]));
        }
      }
    }
    return d;
  }

  double max_abs_diff(const SymmetricClassFunction& o) const {
    if (o.arity_ != arity_) throw InputError("class function: arity mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) d = std::max(d, std::abs(v_[i] - o.v_[i]));
    return d;
  }

 private:
  GroupPtr g_;
  int arity_ = 0;
  std::vector<double> v_;
};

/// Z^ε_{p,g,t} tabulated over all p-tuples of classes.
inline SymmetricClassFunction z_function(bool orientable, int p, int genus, double t, const HeatKernel& q) {
  SurfaceSpec base{orientable, genus, {}, t};
  base.validate();
  detail::require_admissible(q, orientable);
  const GroupPtr& g = q.group();
  MeasureD m0 = measure_m(g, base).to_double();
  std::vector<MeasureD> deltas;
  for (int c = 0; c < g->class_count(); ++c) deltas.push_back(delta_class(g, c).to_double());
  ClassDensity qt = q.at(t);
  SymmetricClassFunction z(g, p);
  for (std::size_t i = 0; i < z.size(); ++i) {
    MeasureD m = m0;
    for (int c : z.classes_at(i)) m = convolve(m, deltas[static_cast<std::size_t>(c)]);
    double s = 0.0;
    for (Element x = 0; x < g->size(); ++x) s += qt(x) * m(x);
    z.at_index(i) = s;
  }
  return z;
}

/// υf(…) = (1/n) Σ_x f(…, x²)
inline SymmetricClassFunction upsilon(const SymmetricClassFunction& f) {
  if (f.arity() < 1) throw InputError("upsilon: arity must be at least 1");
  const FiniteGroup& g = *f.group();
  SymmetricClassFunction out(f.group(), f.arity() - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = out.classes_at(i);
    c.push_back(0);
    double s = 0.0;
    for (Element x = 0; x < g.size(); ++x) {
      c.back() = g.class_of(g.mul(x, x));
      s += f(c);
    }
    out.at_index(i) = s / g.size();
  }
  return out;
}

/// β₁f(…) = (1/n) Σ_x f(…, x, x⁻¹)
inline SymmetricClassFunction beta1(const SymmetricClassFunction& f) {
  if (f.arity() < 2) throw InputError("beta1: arity must be at least 2");
  const FiniteGroup& g = *f.group();
  SymmetricClassFunction out(f.group(), f.arity() - 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = out.classes_at(i);
    c.push_back(0);
    c.push_back(0);
    double s = 0.0;
    for (Element x = 0; x < g.size(); ++x) {
      c[c.size() - 2] = g.class_of(x);
      c.back() = g.class_of(g.inv(x));
      s += f(c);
    }
    out.at_index(i) = s / g.size();
  }
  return out;
}

/// β₂(f ⊗ f')(x…, y…) = (1/n) Σ_z f(x…, z) f'(y…, z⁻¹)
inline SymmetricClassFunction beta2(const SymmetricClassFunction& f, const SymmetricClassFunction& h) {
  if (f.arity() < 1 || h.arity() < 1) throw InputError("beta2: both arities must be at least 1");
  require_same_group(*f.group(), *h.group());
  const FiniteGroup& g = *f.group();
  SymmetricClassFunction out(f.group(), f.arity() + h.arity() - 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = out.classes_at(i);
    std::vector<int> a(c.begin(), c.begin() + (f.arity() - 1));
    std::vector<int> b(c.begin() + (f.arity() - 1), c.end());
    a.push_back(0);
    b.push_back(0);
    double s = 0.0;
    for (Element z = 0; z < g.size(); ++z) {
      a.back() = g.class_of(z);
      b.back() = g.class_of(g.inv(z));
      s += f(a) * h(b);
    }
    out.at_index(i) = s / g.size();
  }
  return out;
}

/// Dense pmf over G^k; the first generator is the most significant digit.
struct GeneratorPmf {
  int k = 0;
  int n = 0;
  std::vector<double> p;
  double total = 0.0;

  std::size_t index(const std::vector<Element>& xs) const {
    std::size_t i = 0;
    for (Element x : xs) i = i * static_cast<std::size_t>(n) + static_cast<std::size_t>(x);
    return i;
  }
  std::vector<Element> values_at(std::size_t i) const {
    std::vector<Element> xs(static_cast<std::size_t>(k));
    for (int j = k - 1; j >= 0; --j) {
      xs[static_cast<std::size_t>(j)] = static_cast<Element>(i % static_cast<std::size_t>(n));
      i /= static_cast<std::size_t>(n);
    }
    return xs;
  }
  double max_abs_diff(const GeneratorPmf& o) const {
    if (o.p.size() != p.size()) throw InputError("pmf: shape mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d = std::max(d, std::abs(p[i] - o.p[i]));
    return d;
  }
};

namespace detail {

inline std::size_t pmf_size(int n, int k) {
  double s = std::pow(static_cast<double>(n), k);
  if (s > 1e8) throw CapExceeded("generator pmf has more than 1e8 cells");
  return static_cast<std::size_t>(s);
}

}  // namespace detail

/// Exact joint law of (h(gen₁), …, h(gen_k)) under the constrained uniform
/// measure, weighted by the holonomy-field density when `q` is given; divided
/// by the total mass when `normalize` is set.
inline GeneratorPmf marginal_generators(const RibbonMap& m, const GConstraints& c, const std::vector<EdgeWord>& gens,
                                        const GroupPtr& g, const HeatKernel* q = nullptr, bool normalize = false,
                                        double cap = kDefaultCap) {
  for (const auto& w : gens) check_path(m, w);
  GeneratorPmf r;
  r.k = static_cast<int>(gens.size());
  r.n = g->size();
  r.p.assign(detail::pmf_size(r.n, r.k), 0.0);
  std::optional<DfWeight> w;
  if (q) w.emplace(m, *q);
  ConstrainedSpace sp(g, m, c);
  const double unit = 1.0 / static_cast<double>(sp.size());
  std::vector<Element> xs(gens.size());
  sp.for_each(
      [&](const HolonomyConfig& h, const std::vector<int>&) {
        for (std::size_t i = 0; i < gens.size(); ++i) xs[i] = holonomy_of_word(*g, m, h, gens[i]);
        double wt = w ? (*w)(h) : 1.0;
        r.p[r.index(xs)] += wt * unit;
      },
      cap);
  r.total = std::accumulate(r.p.begin(), r.p.end(), 0.0);
  if (normalize && r.total > 0.0)
    for (auto& x : r.p) x /= r.total;
  return r;
}

/// Class constraint carried by each boundary generator c_i of `tg`.
inline std::vector<int> boundary_generator_classes(const FiniteGroup& g, const TameGenerators& tg, const GConstraints& c) {
  std::vector<int> out;
  for (std::size_t i = 0; i < tg.c.size(); ++i) {
    int cls = c.boundary.at(static_cast<std::size_t>(tg.c_circuit[i]));
    out.push_back(tg.c_exponent[i] > 0 ? cls : g.classes().inverse_class[static_cast<std::size_t>(cls)]);
  }
  return out;
}

/// Holonomy of the last facial lasso forced by the relation:
/// h(l_f) = h(c_p)⋯h(c_1)·h(w(a))·(h(l_{f−1})⋯h(l_1))⁻¹.
inline Element last_facial_holonomy(const FiniteGroup& g, const TameGenerators& tg, const std::vector<Element>& a,
                                    const std::vector<Element>& c, const std::vector<Element>& l_head) {
  Element hw = g.identity();
  for (const auto& s : tg.w) {
    Element x = a.at(static_cast<std::size_t>(s.index));
    hw = g.mul(s.exponent > 0 ? x : g.inv(x), hw);
  }
  Element hc = hw;
  for (Element y : c) hc = g.mul(y, hc);
  Element hl = g.identity();
  for (Element z : l_head) hl = g.mul(z, hl);
  return g.mul(hc, g.inv(hl));
}

/// Closed form of the joint law of the free generators (a, c, l₁..l_{f−1})
/// under the holonomy field: n^{1−g−f}/∏|O_i| · ∏_i Q_{t_i}(h(l_i)).
inline GeneratorPmf tame_closed_form(const RibbonMap& m, const TameGenerators& tg, const GConstraints& c,
                                     const HeatKernel& q) {
  const GroupPtr& g = q.group();
  const int n = g->size();
  const int na = static_cast<int>(tg.a.size()), nc = static_cast<int>(tg.c.size()), nl = static_cast<int>(tg.l.size());
  if (!m.has_areas()) throw InputError("closed form: face areas are not assigned");
  if (!m.orientable() && !q.jump().inversion_invariant()) {
    throw InputError("closed form: non-orientable maps need an inversion-invariant jump measure");
  }
  std::vector<std::vector<double>> kern;
  for (int i = 0; i < nl; ++i) kern.push_back(q.at(m.area(tg.face_of_l[static_cast<std::size_t>(i)])).values());
  auto cls = boundary_generator_classes(*g, tg, c);
  GeneratorPmf r;
  r.k = na + nc + nl - 1;
  r.n = n;
  r.p.assign(detail::pmf_size(n, r.k), 0.0);
  double prefactor = std::pow(static_cast<double>(n), 1 - na - nl);
  for (int ci : cls) prefactor /= g->classes().size[static_cast<std::size_t>(ci)];
  for (std::size_t i = 0; i < r.p.size(); ++i) {
    auto xs = r.values_at(i);
    std::vector<Element> a(xs.begin(), xs.begin() + na);
    std::vector<Element> cv(xs.begin() + na, xs.begin() + na + nc);
    std::vector<Element> lh(xs.begin() + na + nc, xs.end());
    bool ok = true;
    for (int j = 0; j < nc; ++j)
      if (g->class_of(cv[static_cast<std::size_t>(j)]) != cls[static_cast<std::size_t>(j)]) ok = false;
    if (!ok) continue;
    double v = prefactor;
    for (int j = 0; j + 1 < nl; ++j) v *= kern[static_cast<std::size_t>(j)][static_cast<std::size_t>(lh[static_cast<std::size_t>(j)])];
    v *= kern[static_cast<std::size_t>(nl - 1)][static_cast<std::size_t>(last_facial_holonomy(*g, tg, a, cv, lh))];
    r.p[i] = v;
  }
  r.total = std::accumulate(r.p.begin(), r.p.end(), 0.0);
  return r;
}

/// Sweeps of single-slot heat-bath updates run per heat-bath sample.
inline constexpr int kHeatBathSweeps = 100;
/// Largest state space sampled exactly by inversion of the cumulative table.
inline constexpr double kExactSamplingLimit = 1e6;

/// Sampler of the holonomy field: exact categorical sampling on small state
/// spaces, otherwise a single-slot heat-bath chain (kHeatBathSweeps sweeps
/// between returned samples).
class DfSampler {
 public:
  DfSampler(const RibbonMap& m, const GConstraints& c, const HeatKernel& q, std::uint64_t seed,
            int sweeps = kHeatBathSweeps, bool force_heat_bath = false)
      : space_(q.group(), m, c), weight_(m, q), rng_(seed), sweeps_(sweeps) {
    exact_ = !force_heat_bath && space_.size() <= static_cast<long double>(kExactSamplingLimit);
    if (exact_) {
      space_.for_each([&](const HolonomyConfig& h, const std::vector<int>& idx) {
        cumulative_.push_back((cumulative_.empty() ? 0.0 : cumulative_.back()) + weight_(h));
        states_.push_back(idx);
      }, kExactSamplingLimit);
      if (cumulative_.back() <= 0.0) throw NumericalError("sampler: the holonomy-field weight vanishes identically");
    } else {
      state_ = space_.sample_indices(rng_);
    }
  }

  bool exact() const noexcept { return exact_; }
  const ConstrainedSpace& space() const noexcept { return space_; }

  HolonomyConfig sample() {
    if (exact_) {
      std::uniform_real_distribution<double> u(0.0, cumulative_.back());
      double r = u(rng_);
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
      if (it == cumulative_.end()) --it;
      return space_.config(states_[static_cast<std::size_t>(it - cumulative_.begin())]);
    }
    for (int s = 0; s < sweeps_; ++s) sweep();
    return space_.config(state_);
  }

  /// Conditional law of slot k given the others (heat-bath update).
  std::vector<double> conditional(const std::vector<int>& state, std::size_t k) const {
    std::vector<int> st = state;
    std::vector<double> w(space_.slot_values(k).size());
    double total = 0.0;
    for (std::size_t v = 0; v < w.size(); ++v) {
      st[k] = static_cast<int>(v);
      w[v] = weight_(space_.config(st));
      total += w[v];
    }
    if (total <= 0.0) {
      std::fill(w.begin(), w.end(), 0.0);
      w[static_cast<std::size_t>(state[k])] = 1.0;
      return w;
    }
    for (auto& x : w) x /= total;
    return w;
  }

  const std::vector<int>& chain_state() const noexcept { return state_; }

 private:
  void sweep() {
    for (std::size_t k = 0; k < space_.slot_count(); ++k) {
      auto w = conditional(state_, k);
      std::discrete_distribution<int> pick(w.begin(), w.end());
      state_[k] = pick(rng_);
    }
  }

  ConstrainedSpace space_;
  DfWeight weight_;
  std::mt19937_64 rng_;
  int sweeps_;
  bool exact_ = true;
  std::vector<double> cumulative_;
  std::vector<std::vector<int>> states_;
  std::vector<int> state_;
};

inline HolonomyConfig sample_df(const RibbonMap& m, const GConstraints& c, const HeatKernel& q, std::uint64_t seed) {
  DfSampler s(m, c, q, seed);
  return s.sample();
}

}  // namespace mhf
