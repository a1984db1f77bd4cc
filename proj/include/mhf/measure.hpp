#pragma once

// Conjugation-invariant measures and densities on a finite group and their
// convolution algebra.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "mhf/error.hpp"
#include "mhf/group.hpp"
#include "mhf/rational.hpp"

namespace mhf {

namespace detail {

template <class Scalar>
bool nearly_equal(const Scalar& a, const Scalar& b, double scale) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    (void)scale;
    return a == b;
  } else {
    return std::abs(a - b) <= 1e-12 * (1.0 + scale);
  }
}

}  // namespace detail

/// Measure on G given by the mass w(x) of each singleton, constant on
/// conjugacy classes. `Scalar` is double or Rational.
template <class Scalar>
class ClassMeasure {
 public:
  ClassMeasure() = default;

  /// Throws InputError if `w` has the wrong length, a negative entry or is
  /// not constant on conjugacy classes.
  ClassMeasure(GroupPtr g, std::vector<Scalar> w) : group_(std::move(g)), w_(std::move(w)) {
    if (!group_) throw InputError("measure: null group");
    if (w_.size() != group_->order()) {
      throw InputError("measure: expected " + std::to_string(group_->order()) +
                       " weights, got " + std::to_string(w_.size()));
    }
    double scale = 0.0;
    for (const auto& x : w_) scale = std::max(scale, std::abs(mhf::to_double(x)));
    const auto& cls = group_->classes();
    for (std::size_t x = 0; x < w_.size(); ++x) {
      if (w_[x] < 0) throw InputError("measure: negative weight at element " + std::to_string(x));
      const Scalar& r = w_[static_cast<std::size_t>(
          cls.representative[static_cast<std::size_t>(cls.class_of[x])])];
      if (!detail::nearly_equal(w_[x], r, scale)) {
        throw InputError("measure: weights are not constant on the class of element " +
                         std::to_string(x));
      }
    }
    mass_ = Scalar(0);
    for (const auto& x : w_) mass_ += x;
  }

  /// Zero measure.
  static ClassMeasure zero(GroupPtr g) {
    std::vector<Scalar> w(g->order(), Scalar(0));
    return ClassMeasure(std::move(g), std::move(w));
  }

  /// Uniform probability on G.
  static ClassMeasure uniform(GroupPtr g) {
    std::vector<Scalar> w(g->order(), Scalar(1) / Scalar(static_cast<int>(g->order())));
    return ClassMeasure(std::move(g), std::move(w));
  }

  /// Measure from one weight per class, copied to every singleton of the class.
  static ClassMeasure from_class_weights(GroupPtr g, const std::vector<Scalar>& per_class) {
    if (per_class.size() != static_cast<std::size_t>(g->class_count())) {
      throw InputError("measure: expected one weight per class");
    }
    std::vector<Scalar> w(g->order());
    for (std::size_t x = 0; x < w.size(); ++x)
      w[x] = per_class[static_cast<std::size_t>(g->class_of(static_cast<Element>(x)))];
    return ClassMeasure(std::move(g), std::move(w));
  }

  const GroupPtr& group() const noexcept { return group_; }
  const FiniteGroup& G() const noexcept { return *group_; }
  const std::vector<Scalar>& weights() const noexcept { return w_; }
  const Scalar& operator()(Element x) const { return w_.at(static_cast<std::size_t>(x)); }
  const Scalar& mass() const noexcept { return mass_; }

  bool is_probability() const {
    if constexpr (std::is_same_v<Scalar, Rational>) {
      return mass_ == 1;
    } else {
      return std::abs(mass_ - 1.0) <= 1e-12;
    }
  }

  /// Measure of the set of elements of class c.
  Scalar class_mass(int c) const {
    const auto& cls = group_->classes();
    return w_[static_cast<std::size_t>(cls.representative.at(static_cast<std::size_t>(c)))] *
           Scalar(cls.size[static_cast<std::size_t>(c)]);
  }

  /// Image under x ↦ x⁻¹.
  ClassMeasure reversed() const {
    std::vector<Scalar> w(w_.size());
    for (std::size_t x = 0; x < w.size(); ++x) w[x] = w_[static_cast<std::size_t>(group_->inv(static_cast<Element>(x)))];
    return ClassMeasure(group_, std::move(w));
  }

  bool inversion_invariant() const {
    double scale = 0.0;
    for (const auto& x : w_) scale = std::max(scale, std::abs(mhf::to_double(x)));
    for (std::size_t x = 0; x < w_.size(); ++x) {
      if (!detail::nearly_equal(w_[x], w_[static_cast<std::size_t>(group_->inv(static_cast<Element>(x)))], scale)) return false;
    }
    return true;
  }

  ClassMeasure scaled(const Scalar& s) const {
    std::vector<Scalar> w = w_;
    for (auto& x : w) x *= s;
    return ClassMeasure(group_, std::move(w));
  }

  ClassMeasure<double> to_double() const {
    std::vector<double> w(w_.size());
    for (std::size_t x = 0; x < w.size(); ++x) w[x] = mhf::to_double(w_[x]);
    return ClassMeasure<double>(group_, std::move(w));
  }

  friend bool operator==(const ClassMeasure& a, const ClassMeasure& b) {
    return a.group_ && b.group_ && a.group_->same_law(*b.group_) && a.w_ == b.w_;
  }

 private:
  GroupPtr group_;
  std::vector<Scalar> w_;
  Scalar mass_{0};
};

using MeasureD = ClassMeasure<double>;
using MeasureQ = ClassMeasure<Rational>;

/// Real function on G, constant on classes, read as a density with respect
/// to the uniform probability: the associated measure of {x} is f(x)/n.
class ClassDensity {
 public:
  ClassDensity() = default;
  ClassDensity(GroupPtr g, std::vector<double> f) : group_(std::move(g)), f_(std::move(f)) {
    if (!group_) throw InputError("density: null group");
    if (f_.size() != group_->order()) throw InputError("density: wrong length");
  }

  static ClassDensity from_measure(const MeasureD& m) {
    std::vector<double> f = m.weights();
    const double n = static_cast<double>(m.G().order());
    for (auto& x : f) x *= n;
    return ClassDensity(m.group(), std::move(f));
  }

  static ClassDensity constant(GroupPtr g, double c) {
    std::vector<double> f(g->order(), c);
    return ClassDensity(std::move(g), std::move(f));
  }

  MeasureD to_measure() const {
    std::vector<double> w = f_;
    const double n = static_cast<double>(group_->order());
    for (auto& x : w) x /= n;
    return MeasureD(group_, std::move(w));
  }

  const GroupPtr& group() const noexcept { return group_; }
  const FiniteGroup& G() const noexcept { return *group_; }
  const std::vector<double>& values() const noexcept { return f_; }
  double operator()(Element x) const { return f_.at(static_cast<std::size_t>(x)); }

  /// (1/n) Σ f(x)
  double mean() const {
    double s = 0.0;
    for (double x : f_) s += x;
    return s / static_cast<double>(f_.size());
  }

  bool is_probability() const { return std::abs(mean() - 1.0) <= 1e-12; }

  double max_abs_diff(const ClassDensity& other) const {
    require_same_group(*group_, *other.group_);
    double d = 0.0;
    for (std::size_t i = 0; i < f_.size(); ++i) d = std::max(d, std::abs(f_[i] - other.f_[i]));
    return d;
  }

 private:
  GroupPtr group_;
  std::vector<double> f_;
};

/// (μ∗ν)({x}) = Σ_y μ({y}) ν({y⁻¹x})
template <class Scalar>
ClassMeasure<Scalar> convolve(const ClassMeasure<Scalar>& mu, const ClassMeasure<Scalar>& nu) {
  const FiniteGroup& g = mu.G();
  require_same_group(g, nu.G());
  const auto& cls = g.classes();
  std::vector<Scalar> per_class(static_cast<std::size_t>(cls.count), Scalar(0));
  for (int c = 0; c < cls.count; ++c) {
    Element x = cls.representative[static_cast<std::size_t>(c)];
    Scalar s(0);
    for (Element y = 0; y < g.size(); ++y) {
      const Scalar& a = mu(y);
      if (a == 0) continue;
      s += a * nu(g.mul(g.inv(y), x));
    }
    per_class[static_cast<std::size_t>(c)] = std::move(s);
  }
  return ClassMeasure<Scalar>::from_class_weights(mu.group(), per_class);
}

/// μ^{∗k}, with μ^{∗0} the point mass at the identity.
template <class Scalar>
ClassMeasure<Scalar> convolution_power(const ClassMeasure<Scalar>& mu, int k) {
  if (k < 0) throw InputError("convolution power must be non-negative");
  std::vector<Scalar> w(mu.G().order(), Scalar(0));
  w[0] = Scalar(1);
  ClassMeasure<Scalar> r(mu.group(), std::move(w));
  for (int i = 0; i < k; ++i) r = convolve(r, mu);
  return r;
}

/// (f★g)(x) = (1/n) Σ_y f(y) g(y⁻¹x)
inline ClassDensity density_convolve(const ClassDensity& f, const ClassDensity& h) {
  const FiniteGroup& g = f.G();
  require_same_group(g, h.G());
  const auto& cls = g.classes();
  std::vector<double> out(g.order());
  const double n = static_cast<double>(g.order());
  for (int c = 0; c < cls.count; ++c) {
    Element x = cls.representative[static_cast<std::size_t>(c)];
    double s = 0.0;
    for (Element y = 0; y < g.size(); ++y) s += f(y) * h(g.mul(g.inv(y), x));
    for (Element m : cls.members[static_cast<std::size_t>(c)]) out[static_cast<std::size_t>(m)] = s / n;
  }
  return ClassDensity(f.group(), std::move(out));
}

/// Invariant probability on class c: 1/|C_c| on each element of c.
inline MeasureQ delta_class(const GroupPtr& g, int c) {
  if (c < 0 || c >= g->class_count()) {
    throw InputError("class index " + std::to_string(c) + " out of range");
  }
  std::vector<Rational> w(g->order(), Rational(0));
  const auto& cls = g->classes();
  Rational v(1, cls.size[static_cast<std::size_t>(c)]);
  for (Element m : cls.members[static_cast<std::size_t>(c)]) w[static_cast<std::size_t>(m)] = v;
  return MeasureQ(g, std::move(w));
}

/// Law of the commutator aba⁻¹b⁻¹ of two independent uniform elements.
inline MeasureQ eta_measure(const GroupPtr& g) {
  const int n = g->size();
  std::vector<long long> count(g->order(), 0);
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b) ++count[static_cast<std::size_t>(g->commutator(a, b))];
  std::vector<Rational> w(g->order());
  for (std::size_t x = 0; x < w.size(); ++x) w[x] = Rational(count[x], static_cast<long long>(n) * n);
  return MeasureQ(g, std::move(w));
}

/// Law of the square of a uniform element.
inline MeasureQ kappa_measure(const GroupPtr& g) {
  const int n = g->size();
  std::vector<long long> count(g->order(), 0);
  for (Element a = 0; a < n; ++a) ++count[static_cast<std::size_t>(g->mul(a, a))];
  std::vector<Rational> w(g->order());
  for (std::size_t x = 0; x < w.size(); ++x) w[x] = Rational(count[x], n);
  return MeasureQ(g, std::move(w));
}

}  // namespace mhf
