#pragma once

// Jump measures of conjugation-invariant Lévy processes on a finite group and
// their heat kernels.

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mhf/characters.hpp"
#include "mhf/error.hpp"
#include "mhf/group.hpp"
#include "mhf/measure.hpp"

namespace mhf {

inline constexpr double kDefaultTailTol = 1e-12;

/// Lévy measure Π of a pure-jump process: a class measure with no mass at
/// the identity.
class JumpMeasure {
 public:
  JumpMeasure() = default;

  explicit JumpMeasure(MeasureD pi) : pi_(std::move(pi)) {
    if (pi_(0) != 0.0) throw InputError("jump measure: the identity must carry no mass");
    inversion_invariant_ = pi_.inversion_invariant();
  }

  /// Rates given as the total mass Π(C) of each class, spread evenly over the
  /// elements of the class.
  static JumpMeasure from_class_rates(const GroupPtr& g, const std::vector<double>& class_rate) {
    if (class_rate.size() != static_cast<std::size_t>(g->class_count())) {
      throw InputError("jump measure: expected one rate per class");
    }
    std::vector<double> per(class_rate.size());
    for (std::size_t c = 0; c < per.size(); ++c) {
      if (!(class_rate[c] >= 0.0) || !std::isfinite(class_rate[c])) {
        throw InputError("jump measure: rates must be finite and non-negative");
      }
      per[c] = class_rate[c] / g->classes().size[c];
    }
    return JumpMeasure(MeasureD::from_class_weights(g, per));
  }

  /// Total rate `total` spread uniformly over the non-identity elements.
  static JumpMeasure uniform_nonidentity(const GroupPtr& g, double total = 1.0) {
    std::vector<double> w(g->order(), 0.0);
    if (g->order() > 1) {
      for (std::size_t x = 1; x < w.size(); ++x) w[x] = total / static_cast<double>(g->order() - 1);
    }
    return JumpMeasure(MeasureD(g, std::move(w)));
  }

  /// Total rate `total` spread uniformly over class c.
  static JumpMeasure on_class(const GroupPtr& g, int c, double total = 1.0) {
    std::vector<double> rates(static_cast<std::size_t>(g->class_count()), 0.0);
    rates.at(static_cast<std::size_t>(c)) = total;
    return from_class_rates(g, rates);
  }

  const MeasureD& measure() const noexcept { return pi_; }
  const GroupPtr& group() const noexcept { return pi_.group(); }
  const FiniteGroup& G() const noexcept { return pi_.G(); }
  double total_rate() const noexcept { return pi_.mass(); }
  bool inversion_invariant() const noexcept { return inversion_invariant_; }
  double operator()(Element x) const { return pi_(x); }

  /// Π₁ = Π / Π(G); the zero measure when Π = 0.
  MeasureD normalized() const {
    if (total_rate() <= 0.0) return MeasureD::zero(group());
    return pi_.scaled(1.0 / total_rate());
  }

 private:
  MeasureD pi_;
  bool inversion_invariant_ = true;
};

struct AdmissibilityReport {
  bool conjugation_invariant = true;
  std::vector<Element> generated_subgroup;
  bool generates = false;
  bool inversion_invariant = false;
  bool inversion_required = false;
  bool admissible = false;
};

/// Subgroup generated by the support of Π.
inline std::vector<Element> generated_subgroup(const JumpMeasure& pi) {
  std::vector<Element> support;
  for (Element x = 0; x < pi.G().size(); ++x)
    if (pi(x) > 0.0) support.push_back(x);
  return pi.G().generated_subgroup(support);
}

inline AdmissibilityReport check_admissible(const JumpMeasure& pi, bool require_inversion) {
  AdmissibilityReport r;
  r.generated_subgroup = generated_subgroup(pi);
  r.generates = r.generated_subgroup.size() == pi.G().order();
  r.inversion_invariant = pi.inversion_invariant();
  r.inversion_required = require_inversion;
  r.admissible = r.generates && (!require_inversion || r.inversion_invariant);
  return r;
}

/// Poisson(λ) weights p_0..p_K with K the least index such that the tail
/// P(N > K) is at most tail_tol (bounded by p_{K+1}/(1 − λ/(K+2))).
struct PoissonTruncation {
  std::vector<double> weights;
  double tail_bound = 0.0;
  int K() const noexcept { return static_cast<int>(weights.size()) - 1; }
};

inline PoissonTruncation poisson_truncation(double lambda, double tail_tol = kDefaultTailTol,
                                            int min_K = 0) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("Poisson intensity must be finite and non-negative");
  if (!(tail_tol > 0.0)) throw InputError("tail tolerance must be positive");
  PoissonTruncation p;
  if (lambda == 0.0) {
    p.weights.assign(static_cast<std::size_t>(min_K) + 1, 0.0);
    p.weights[0] = 1.0;
    return p;
  }
  const double log_lambda = std::log(lambda);
  auto log_term = [&](int k) { return -lambda + k * log_lambda - std::lgamma(k + 1.0); };
  for (int k = 0;; ++k) {
    p.weights.push_back(std::exp(log_term(k)));
    if (k >= min_K && k + 2 > lambda) {
      double bound = std::exp(log_term(k + 1)) / (1.0 - lambda / (k + 2));
      if (bound <= tail_tol) {
        p.tail_bound = bound;
        return p;
      }
    }
    if (k > 100000) throw NumericalError("Poisson truncation did not converge");
  }
}

/// S(x) = Σ_{k ≤ K} Pois(k; λ) Π₁^{∗k}({x}) with λ = tΠ(G): the law of
/// the product of a Poisson number of Π₁-distributed jumps, before
/// renormalization.
struct PoissonMixture {
  MeasureD law;
  PoissonTruncation truncation;
};

inline PoissonMixture poisson_mixture(const JumpMeasure& pi, double t, double tail_tol = kDefaultTailTol,
                                      int min_K = 0) {
  if (!(t >= 0.0)) throw InputError("time must be non-negative");
  PoissonMixture m{MeasureD::zero(pi.group()), poisson_truncation(t * pi.total_rate(), tail_tol, min_K)};
  const MeasureD step = pi.normalized();
  std::vector<double> acc(pi.G().order(), 0.0);
  MeasureD power = convolution_power(step, 0);
  for (int k = 0; k <= m.truncation.K(); ++k) {
    if (k > 0) power = convolve(power, step);
    const double pk = m.truncation.weights[static_cast<std::size_t>(k)];
    for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += pk * power.weights()[x];
  }
  m.law = MeasureD(pi.group(), std::move(acc));
  return m;
}

struct SeriesKernel {
  ClassDensity density;
  int truncation = 0;
  double tail_bound = 0.0;
};

/// Q_t = n Σ_k Pois(k; tΠ(G)) Π₁^{∗k}, truncated by the Poisson tail and
/// renormalized to a probability density.
inline SeriesKernel heat_kernel_series_report(const JumpMeasure& pi, double t, double tail_tol = kDefaultTailTol,
                                              int min_K = 0) {
  if (t < 0.0) throw InputError("heat kernel: negative time");
  PoissonMixture m = poisson_mixture(pi, t, tail_tol, min_K);
  const double mass = m.law.mass();
  std::vector<double> f = m.law.weights();
  const double n = static_cast<double>(pi.G().order());
  for (auto& x : f) x *= n / mass;
  return {ClassDensity(pi.group(), std::move(f)), m.truncation.K(), m.truncation.tail_bound};
}

inline ClassDensity heat_kernel_series(const JumpMeasure& pi, double t, double tail_tol = kDefaultTailTol) {
  return heat_kernel_series_report(pi, t, tail_tol).density;
}

/// Exponents λ_α = Π(G) − Π̂(α)/d_α.
inline std::vector<Complex> levy_exponents(const JumpMeasure& pi, const CharacterTable& table) {
  std::vector<Complex> ex;
  for (int a = 0; a < table.count(); ++a) {
    ex.push_back(pi.total_rate() - fourier_coefficient(pi.measure(), table, a) /
                                       static_cast<double>(table.dim[static_cast<std::size_t>(a)]));
  }
  return ex;
}

namespace detail {

inline ClassDensity kernel_from_exponents(const GroupPtr& g, const CharacterTable& table,
                                          const std::vector<Complex>& ex, double t) {
  const auto& cls = g->classes();
  std::vector<double> f(g->order());
  for (int c = 0; c < cls.count; ++c) {
    Complex s = 0.0;
    for (int a = 0; a < table.count(); ++a) {
      const double d = table.dim[static_cast<std::size_t>(a)];
      s += d * std::exp(-t * ex[static_cast<std::size_t>(a)]) * table.chi[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
    }
    if (std::abs(s.imag()) > 1e-9) {
      throw NumericalError("heat kernel: residual imaginary part " + std::to_string(s.imag()) +
                           " on class " + std::to_string(c));
    }
    for (Element m : cls.members[static_cast<std::size_t>(c)]) f[static_cast<std::size_t>(m)] = s.real();
  }
  return ClassDensity(g, std::move(f));
}

}  // namespace detail

/// Q_t(x) = Σ_α d_α e^{−t λ_α} χ_α(x).
inline ClassDensity heat_kernel_characters(const JumpMeasure& pi, double t, const CharacterTable& table) {
  if (t < 0.0) throw InputError("heat kernel: negative time");
  require_same_group(pi.G(), *table.group);
  return detail::kernel_from_exponents(pi.group(), table, levy_exponents(pi, table), t);
}

/// Heat kernel evaluated through the character table, with a per-time cache
/// safe for concurrent readers.
class HeatKernel {
 public:
  HeatKernel(JumpMeasure pi, std::shared_ptr<const CharacterTable> table)
      : pi_(std::move(pi)), table_(std::move(table)) {
    if (!table_) throw InputError("heat kernel: missing character table");
    require_same_group(pi_.G(), *table_->group);
    exponents_ = levy_exponents(pi_, *table_);
  }

  explicit HeatKernel(JumpMeasure pi)
      : HeatKernel(pi, std::make_shared<const CharacterTable>(character_table(pi.group()))) {}

  HeatKernel(const HeatKernel& o) : pi_(o.pi_), table_(o.table_), exponents_(o.exponents_) {
    std::lock_guard lock(o.mutex_);
    cache_ = o.cache_;
  }
  HeatKernel& operator=(const HeatKernel&) = delete;

  const JumpMeasure& jump() const noexcept { return pi_; }
  const CharacterTable& table() const noexcept { return *table_; }
  const std::shared_ptr<const CharacterTable>& table_ptr() const noexcept { return table_; }
  const std::vector<Complex>& exponents() const noexcept { return exponents_; }
  const GroupPtr& group() const noexcept { return pi_.group(); }

  ClassDensity at(double t) const {
    if (t < 0.0) throw InputError("heat kernel: negative time");
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(t);
      if (it != cache_.end()) return it->second;
    }
    ClassDensity q = detail::kernel_from_exponents(pi_.group(), *table_, exponents_, t);
    std::lock_guard lock(mutex_);
    cache_.emplace(t, q);
    return q;
  }

  double operator()(double t, Element x) const { return at(t)(x); }

 private:
  JumpMeasure pi_;
  std::shared_ptr<const CharacterTable> table_;
  std::vector<Complex> exponents_;
  mutable std::mutex mutex_;
  mutable std::map<double, ClassDensity> cache_;
};

struct PositivityReport {
  std::vector<Element> subgroup;
  double min_on_subgroup = 0.0;
  double max_off_subgroup = 0.0;
  /// (1/n) Σ_{x≠1} Q_t(x), compared with tΠ(G).
  double nonidentity_mass = 0.0;
  double small_time_bound = 0.0;
  bool positive_on_subgroup = false;
  bool vanishes_off_subgroup = false;
  bool small_time_ok = false;
  bool pass = false;
};

/// Checks Q_t > 0 exactly on ⟨supp Π⟩ and ≈ 0 elsewhere (series route).
inline PositivityReport positivity_support_check(const JumpMeasure& pi, double t,
                                                 double tail_tol = kDefaultTailTol) {
  if (!(t > 0.0)) throw InputError("positivity check needs t > 0");
  PositivityReport r;
  r.subgroup = generated_subgroup(pi);
  // Keep at least n terms so every element of the subgroup is reached.
  ClassDensity q = heat_kernel_series_report(pi, t, tail_tol, pi.G().size()).density;
  std::vector<char> in(pi.G().order(), 0);
  for (Element x : r.subgroup) in[static_cast<std::size_t>(x)] = 1;
  r.min_on_subgroup = std::numeric_limits<double>::infinity();
  for (Element x = 0; x < pi.G().size(); ++x) {
    if (in[static_cast<std::size_t>(x)]) {
      r.min_on_subgroup = std::min(r.min_on_subgroup, q(x));
    } else {
      r.max_off_subgroup = std::max(r.max_off_subgroup, std::abs(q(x)));
    }
    if (x != 0) r.nonidentity_mass += q(x);
  }
  r.nonidentity_mass /= static_cast<double>(pi.G().order());
  r.small_time_bound = t * pi.total_rate();
  r.positive_on_subgroup = r.min_on_subgroup > 0.0;
  r.vanishes_off_subgroup = r.max_off_subgroup <= 1e-10;
  r.small_time_ok = r.nonidentity_mass <= r.small_time_bound;
  r.pass = r.positive_on_subgroup && r.vanishes_off_subgroup && r.small_time_ok;
  return r;
}

}  // namespace mhf
