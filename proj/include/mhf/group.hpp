#pragma once

// Finite groups given by multiplication tables, builtin small groups and
// their conjugacy-class structure.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mhf/error.hpp"

namespace mhf {

/// Index of a group element. The identity is always element 0.
using Element = int;

/// Orbits of the conjugation action.
///
/// Classes are numbered by the smallest element they contain, so the identity
/// class is class 0 and the representative of a class is its smallest element.
struct ConjugacyClassTable {
  int count = 0;
  std::vector<int> class_of;                 // per element
  std::vector<int> size;                     // per class
  std::vector<Element> representative;       // per class
  std::vector<int> inverse_class;            // class of x ↦ class of x⁻¹
  std::vector<std::vector<Element>> members; // per class, ascending
};

class FiniteGroup;
using GroupPtr = std::shared_ptr<const FiniteGroup>;

class FiniteGroup {
 public:
  /// Validates the table and computes inverses and conjugacy classes.
  /// Throws InputError on order 0, out-of-range entries, a non-identity
  /// element 0, missing inverses or a non-associative law.
  static GroupPtr from_table(std::vector<std::vector<Element>> table,
                             std::vector<std::string> labels = {},
                             std::string name = "table") {
    return std::make_shared<const FiniteGroup>(Token{}, std::move(table),
                                               std::move(labels),
                                               std::move(name));
  }

  /// One of Z2, Z3, Z4, Z6, S3, S4, A4, D4, Q8 (canonical orderings are
  /// documented in data/builtin_groups.md).
  static GroupPtr builtin(std::string_view name);

  static const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"Z2", "Z3", "Z4", "Z6", "S3",
                                                "S4", "A4", "D4", "Q8"};
    return names;
  }

  struct Token {};
  FiniteGroup(Token, std::vector<std::vector<Element>> table,
              std::vector<std::string> labels, std::string name)
      : name_(std::move(name)), labels_(std::move(labels)) {
    validate_and_flatten(table);
    if (labels_.empty()) {
      for (std::size_t i = 0; i < n_; ++i) labels_.push_back(std::to_string(i));
    }
    if (labels_.size() != n_) {
      throw InputError("group: expected " + std::to_string(n_) +
                       " labels, got " + std::to_string(labels_.size()));
    }
    compute_classes();
  }

  std::size_t order() const noexcept { return n_; }
  int size() const noexcept { return static_cast<int>(n_); }
  const std::string& name() const noexcept { return name_; }

  static constexpr Element identity() noexcept { return 0; }

  Element mul(Element a, Element b) const noexcept {
    return mul_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)];
  }
  Element inv(Element a) const noexcept { return inv_[static_cast<std::size_t>(a)]; }

  /// g x g⁻¹
  Element conjugate(Element g, Element x) const noexcept {
    return mul(mul(g, x), inv(g));
  }

  /// Commutator a b a⁻¹ b⁻¹.
  Element commutator(Element a, Element b) const noexcept {
    return mul(mul(a, b), mul(inv(a), inv(b)));
  }

  Element power(Element x, long long k) const noexcept {
    if (k < 0) {
      x = inv(x);
      k = -k;
    }
    Element r = identity();
    for (long long i = 0; i < k; ++i) r = mul(r, x);
    return r;
  }

  /// Product of a sequence, left to right.
  Element product(std::span<const Element> xs) const noexcept {
    Element r = identity();
    for (Element x : xs) r = mul(r, x);
    return r;
  }

  const std::string& label(Element x) const { return labels_.at(static_cast<std::size_t>(x)); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::optional<Element> find(std::string_view label) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (labels_[i] == label) return static_cast<Element>(i);
    }
    return std::nullopt;
  }

  const ConjugacyClassTable& classes() const noexcept { return classes_; }
  int class_of(Element x) const noexcept { return classes_.class_of[static_cast<std::size_t>(x)]; }
  int class_count() const noexcept { return classes_.count; }

  bool is_abelian() const noexcept { return classes_.count == size(); }

  /// Multiplication table as rows.
  std::vector<std::vector<Element>> table() const {
    std::vector<std::vector<Element>> t(n_, std::vector<Element>(n_));
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b) t[a][b] = mul_[a * n_ + b];
    return t;
  }

  bool same_law(const FiniteGroup& other) const noexcept {
    return n_ == other.n_ && mul_ == other.mul_;
  }

  /// Subgroup generated by a set of elements, as an ascending list.
  std::vector<Element> generated_subgroup(std::span<const Element> gens) const {
    std::vector<char> in(n_, 0);
    std::vector<Element> members{identity()};
    in[0] = 1;
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (Element g : gens) {
        Element y = mul(members[i], g);
        if (!in[static_cast<std::size_t>(y)]) {
          in[static_cast<std::size_t>(y)] = 1;
          members.push_back(y);
        }
      }
    }
    std::sort(members.begin(), members.end());
    return members;
  }

  /// Elements commuting with every element of `xs`.
  std::vector<Element> centralizer(std::span<const Element> xs) const {
    std::vector<Element> out;
    for (Element g = 0; g < size(); ++g) {
      bool commutes = std::all_of(xs.begin(), xs.end(), [&](Element x) {
        return mul(g, x) == mul(x, g);
      });
      if (commutes) out.push_back(g);
    }
    return out;
  }

 private:
  void validate_and_flatten(const std::vector<std::vector<Element>>& table) {
    n_ = table.size();
    if (n_ == 0) throw InputError("group: order must be positive");
    mul_.assign(n_ * n_, 0);
    for (std::size_t a = 0; a < n_; ++a) {
      if (table[a].size() != n_) {
        throw InputError("group: table row " + std::to_string(a) + " has length " +
                         std::to_string(table[a].size()) + ", expected " +
                         std::to_string(n_));
      }
      for (std::size_t b = 0; b < n_; ++b) {
        Element v = table[a][b];
        if (v < 0 || static_cast<std::size_t>(v) >= n_) {
          throw InputError("group: table entry [" + std::to_string(a) + "][" +
                           std::to_string(b) + "] = " + std::to_string(v) +
                           " is out of range");
        }
        mul_[a * n_ + b] = v;
      }
    }
    for (std::size_t x = 0; x < n_; ++x) {
      if (mul_[x] != static_cast<Element>(x) || mul_[x * n_] != static_cast<Element>(x)) {
        throw InputError("group: element 0 does not act as the identity on element " +
                         std::to_string(x));
      }
    }
    // Every row must be a permutation; this also yields two-sided inverses.
    inv_.assign(n_, -1);
    std::vector<char> seen(n_);
    for (std::size_t a = 0; a < n_; ++a) {
      std::fill(seen.begin(), seen.end(), 0);
      for (std::size_t b = 0; b < n_; ++b) {
        auto v = static_cast<std::size_t>(mul_[a * n_ + b]);
        if (seen[v]) {
          throw InputError("group: row " + std::to_string(a) +
                           " repeats an element (missing inverses or closure violation)");
        }
        seen[v] = 1;
        if (v == 0) inv_[a] = static_cast<Element>(b);
      }
    }
    for (std::size_t a = 0; a < n_; ++a) {
      if (mul_[static_cast<std::size_t>(inv_[a]) * n_ + a] != 0) {
        throw InputError("group: element " + std::to_string(a) + " has no two-sided inverse");
      }
    }
    check_associativity();
  }

  void check_associativity() const {
    auto assoc = [&](std::size_t a, std::size_t b, std::size_t c) {
      auto ab = static_cast<std::size_t>(mul_[a * n_ + b]);
      auto bc = static_cast<std::size_t>(mul_[b * n_ + c]);
      return mul_[ab * n_ + c] == mul_[a * n_ + bc];
    };
    auto fail = [](std::size_t a, std::size_t b, std::size_t c) {
      throw InputError("group: table is not associative at (" + std::to_string(a) +
                       ", " + std::to_string(b) + ", " + std::to_string(c) + ")");
    };
    if (n_ <= 64) {
      for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t b = 0; b < n_; ++b)
          for (std::size_t c = 0; c < n_; ++c)
            if (!assoc(a, b, c)) fail(a, b, c);
      return;
    }
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_int_distribution<std::size_t> pick(0, n_ - 1);
    for (int i = 0; i < 10000; ++i) {
      std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
      if (!assoc(a, b, c)) fail(a, b, c);
    }
  }

  void compute_classes() {
    ConjugacyClassTable t;
    t.class_of.assign(n_, -1);
    for (std::size_t x = 0; x < n_; ++x) {
      if (t.class_of[x] >= 0) continue;
      int c = t.count++;
      std::vector<Element> orbit;
      for (std::size_t g = 0; g < n_; ++g) {
        Element y = conjugate(static_cast<Element>(g), static_cast<Element>(x));
        if (t.class_of[static_cast<std::size_t>(y)] < 0) {
          t.class_of[static_cast<std::size_t>(y)] = c;
          orbit.push_back(y);
        }
      }
      std::sort(orbit.begin(), orbit.end());
      t.representative.push_back(orbit.front());
      t.size.push_back(static_cast<int>(orbit.size()));
      t.members.push_back(std::move(orbit));
    }
    t.inverse_class.resize(static_cast<std::size_t>(t.count));
    for (int c = 0; c < t.count; ++c) {
      t.inverse_class[static_cast<std::size_t>(c)] =
          t.class_of[static_cast<std::size_t>(inv(t.representative[static_cast<std::size_t>(c)]))];
    }
    classes_ = std::move(t);
  }

  std::string name_;
  std::size_t n_ = 0;
  std::vector<Element> mul_;
  std::vector<Element> inv_;
  std::vector<std::string> labels_;
  ConjugacyClassTable classes_;
};

namespace detail {

inline GroupPtr cyclic_group(int n) {
  std::vector<std::vector<Element>> t(static_cast<std::size_t>(n), std::vector<Element>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % n;
  return FiniteGroup::from_table(std::move(t), {}, "Z" + std::to_string(n));
}

// Permutations in lexicographic order of their one-line notation; the
// product is composition, (p q)(i) = p(q(i)).
inline GroupPtr permutation_group(int degree, bool even_only, std::string name) {
  std::vector<int> p(static_cast<std::size_t>(degree));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> perms;
  do {
    int inversions = 0;
    for (int i = 0; i < degree; ++i)
      for (int j = i + 1; j < degree; ++j)
        if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)]) ++inversions;
    if (!even_only || inversions % 2 == 0) perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));

  auto index_of = [&](const std::vector<int>& q) {
    auto it = std::lower_bound(perms.begin(), perms.end(), q);
    return static_cast<Element>(it - perms.begin());
  };
  std::size_t n = perms.size();
  std::vector<std::vector<Element>> t(n, std::vector<Element>(n));
  std::vector<int> r(static_cast<std::size_t>(degree));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (int i = 0; i < degree; ++i)
        r[static_cast<std::size_t>(i)] = perms[a][static_cast<std::size_t>(perms[b][static_cast<std::size_t>(i)])];
      t[a][b] = index_of(r);
    }
  }
  std::vector<std::string> labels;
  for (const auto& q : perms) {
    std::string s;
    for (int v : q) s += static_cast<char>('0' + v);
    labels.push_back(s);
  }
  return FiniteGroup::from_table(std::move(t), std::move(labels), std::move(name));
}

// Element r^k s^j has index k + 4j; s r s⁻¹ = r⁻¹.
inline GroupPtr dihedral8() {
  std::vector<std::vector<Element>> t(8, std::vector<Element>(8));
  for (int x = 0; x < 8; ++x) {
    for (int y = 0; y < 8; ++y) {
      int a = x % 4, b = x / 4, c = y % 4, d = y / 4;
      int k = ((b ? a - c : a + c) % 4 + 4) % 4;
      t[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = k + 4 * (b ^ d);
    }
  }
  return FiniteGroup::from_table(std::move(t),
                                 {"e", "r", "r2", "r3", "s", "rs", "r2s", "r3s"}, "D4");
}

// Ordering 1, -1, i, -i, j, -j, k, -k.
inline GroupPtr quaternion8() {
  // unit products among {1, i, j, k}: (unit, sign)
  static constexpr std::array<std::array<std::pair<int, int>, 4>, 4> units{{
      {{{0, 1}, {1, 1}, {2, 1}, {3, 1}}},
      {{{1, 1}, {0, -1}, {3, 1}, {2, -1}}},
      {{{2, 1}, {3, -1}, {0, -1}, {1, 1}}},
      {{{3, 1}, {2, 1}, {1, -1}, {0, -1}}},
  }};
  auto encode = [](int unit, int sign) { return 2 * unit + (sign < 0 ? 1 : 0); };
  std::vector<std::vector<Element>> t(8, std::vector<Element>(8));
  for (int x = 0; x < 8; ++x) {
    for (int y = 0; y < 8; ++y) {
      int ux = x / 2, sx = (x % 2) ? -1 : 1;
      int uy = y / 2, sy = (y % 2) ? -1 : 1;
      auto [u, s] = units[static_cast<std::size_t>(ux)][static_cast<std::size_t>(uy)];
      t[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = encode(u, s * sx * sy);
    }
  }
  return FiniteGroup::from_table(std::move(t), {"1", "-1", "i", "-i", "j", "-j", "k", "-k"},
                                 "Q8");
}

}  // namespace detail

inline GroupPtr FiniteGroup::builtin(std::string_view name) {
  if (name == "Z2") return detail::cyclic_group(2);
  if (name == "Z3") return detail::cyclic_group(3);
  if (name == "Z4") return detail::cyclic_group(4);
  if (name == "Z6") return detail::cyclic_group(6);
  if (name == "S3") return detail::permutation_group(3, false, "S3");
  if (name == "S4") return detail::permutation_group(4, false, "S4");
  if (name == "A4") return detail::permutation_group(4, true, "A4");
  if (name == "D4") return detail::dihedral8();
  if (name == "Q8") return detail::quaternion8();
  throw InputError("unknown builtin group '" + std::string(name) + "'");
}

inline void require_same_group(const FiniteGroup& a, const FiniteGroup& b) {
  if (&a != &b && !a.same_law(b)) throw InputError("operands live on different groups");
}

}  // namespace mhf
