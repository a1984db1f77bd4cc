#pragma once

// Irreducible characters of a finite group, computed by simultaneous
// diagonalization of the class-multiplication matrices.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mhf/error.hpp"
#include "mhf/group.hpp"
#include "mhf/measure.hpp"

namespace mhf {

using Complex = std::complex<double>;

struct CharacterTable {
  GroupPtr group;
  /// chi[α][c]: value of the α-th irreducible character on class c.
  std::vector<std::vector<Complex>> chi;
  std::vector<int> dim;
  /// Frobenius–Schur indicator: 1 real, 0 complex, −1 quaternionic.
  std::vector<int> fs;

  int count() const noexcept { return static_cast<int>(chi.size()); }

  Complex operator()(int alpha, Element x) const {
    return chi.at(static_cast<std::size_t>(alpha))[static_cast<std::size_t>(group->class_of(x))];
  }

  /// Largest deviation from row orthogonality, column orthogonality and
  /// Σ d² = n.
  double orthogonality_defect() const {
    const auto& cls = group->classes();
    const double n = static_cast<double>(group->order());
    const int r = count();
    double defect = 0.0;
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        Complex s = 0.0;
        for (int c = 0; c < r; ++c)
          s += static_cast<double>(cls.size[static_cast<std::size_t>(c)]) * chi[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] *
               std::conj(chi[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)]);
        defect = std::max(defect, std::abs(s - Complex(a == b ? n : 0.0)));
      }
    }
    for (int c = 0; c < r; ++c) {
      for (int c2 = 0; c2 < r; ++c2) {
        Complex s = 0.0;
        for (int a = 0; a < r; ++a)
          s += chi[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] * std::conj(chi[static_cast<std::size_t>(a)][static_cast<std::size_t>(c2)]);
        double expect = c == c2 ? n / cls.size[static_cast<std::size_t>(c)] : 0.0;
        defect = std::max(defect, std::abs(s - Complex(expect)));
      }
    }
    double d2 = 0.0;
    for (int d : dim) d2 += static_cast<double>(d) * d;
    return std::max(defect, std::abs(d2 - n));
  }
};

namespace detail {

// (M_i)_{jk} = #{x ∈ C_i : x⁻¹ z ∈ C_j} for a fixed z ∈ C_k.
inline std::vector<Eigen::MatrixXd> class_multiplication_matrices(const FiniteGroup& g) {
  const auto& cls = g.classes();
  const int r = cls.count;
  std::vector<Eigen::MatrixXd> m(static_cast<std::size_t>(r), Eigen::MatrixXd::Zero(r, r));
  for (int k = 0; k < r; ++k) {
    Element z = cls.representative[static_cast<std::size_t>(k)];
    for (Element x = 0; x < g.size(); ++x) {
      int i = g.class_of(x);
      int j = g.class_of(g.mul(g.inv(x), z));
      m[static_cast<std::size_t>(i)](j, k) += 1.0;
    }
  }
  return m;
}

inline bool character_less(const std::vector<Complex>& a, int da, const std::vector<Complex>& b, int db) {
  if (da != db) return da < db;
  constexpr double eps = 1e-9;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (std::abs(a[c].real() - b[c].real()) > eps) return a[c].real() > b[c].real();
    if (std::abs(a[c].imag() - b[c].imag()) > eps) return a[c].imag() > b[c].imag();
  }
  return false;
}

}  // namespace detail

/// Number of random combinations tried before giving up on eigenvalue
/// separation.
inline constexpr int kCharacterTableAttempts = 16;

/// Character table with rows sorted by dimension, then by class values in
/// descending lexicographic order (so the trivial character is row 0).
/// Throws NumericalError if no random combination separates the eigenvalues
/// within kCharacterTableAttempts draws.
inline CharacterTable character_table(const GroupPtr& g, std::uint64_t seed = 0x0c4a7ab1eULL) {
  const auto& cls = g->classes();
  const int r = cls.count;
  if (r > 64) throw InputError("character table: more than 64 classes");
  const double n = static_cast<double>(g->order());
  auto mats = detail::class_multiplication_matrices(*g);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(0.5, 1.5);
  for (int attempt = 0; attempt < kCharacterTableAttempts; ++attempt) {
    Eigen::MatrixXd combo = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < r; ++i) combo += coef(rng) * mats[static_cast<std::size_t>(i)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(combo, true);
    if (es.info() != Eigen::Success) continue;
    const auto& ev = es.eigenvalues();
    double scale = 1.0 + ev.cwiseAbs().maxCoeff();
    double gap = std::numeric_limits<double>::infinity();
    for (int a = 0; a < r; ++a)
      for (int b = a + 1; b < r; ++b) gap = std::min(gap, std::abs(ev(a) - ev(b)));
    if (r > 1 && gap < 1e-6 * scale) continue;

    CharacterTable t;
    t.group = g;
    bool ok = true;
    for (int a = 0; a < r && ok; ++a) {
      Eigen::VectorXcd w = es.eigenvectors().col(a);
      if (std::abs(w(0)) < 1e-12) {
        ok = false;
        break;
      }
      w /= w(0);
      double s = 0.0;
      for (int k = 0; k < r; ++k) s += std::norm(w(k)) / cls.size[static_cast<std::size_t>(k)];
      double d = std::sqrt(n / s);
      int di = static_cast<int>(std::lround(d));
      if (di < 1 || std::abs(d - di) > 1e-6) {
        ok = false;
        break;
      }
      std::vector<Complex> row(static_cast<std::size_t>(r));
      for (int k = 0; k < r; ++k) {
        Complex v = static_cast<double>(di) * w(k) / static_cast<double>(cls.size[static_cast<std::size_t>(k)]);
        if (std::abs(v.imag()) < 1e-13) v.imag(0.0);
        row[static_cast<std::size_t>(k)] = v;
      }
      t.chi.push_back(std::move(row));
      t.dim.push_back(di);
    }
    if (!ok) continue;

    std::vector<int> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return detail::character_less(t.chi[static_cast<std::size_t>(a)], t.dim[static_cast<std::size_t>(a)],
                                    t.chi[static_cast<std::size_t>(b)], t.dim[static_cast<std::size_t>(b)]);
    });
    CharacterTable sorted;
    sorted.group = g;
    for (int a : order) {
      sorted.chi.push_back(t.chi[static_cast<std::size_t>(a)]);
      sorted.dim.push_back(t.dim[static_cast<std::size_t>(a)]);
    }
    for (int a = 0; a < r; ++a) {
      Complex s = 0.0;
      for (Element x = 0; x < g->size(); ++x) s += sorted(a, g->mul(x, x));
      sorted.fs.push_back(static_cast<int>(std::lround(s.real() / n)));
    }
    if (sorted.orthogonality_defect() > 1e-9) continue;
    return sorted;
  }
  throw NumericalError("character table: eigenvalues not separated after " +
                       std::to_string(kCharacterTableAttempts) + " random combinations");
}

/// μ̂(α) = Σ_x conj(χ_α(x)) μ({x})
template <class Scalar>
Complex fourier_coefficient(const ClassMeasure<Scalar>& mu, const CharacterTable& t, int alpha) {
  if (alpha < 0 || alpha >= t.count()) {
    throw InputError("irrep index " + std::to_string(alpha) + " out of range");
  }
  require_same_group(mu.G(), *t.group);
  Complex s = 0.0;
  for (Element x = 0; x < mu.G().size(); ++x) s += std::conj(t(alpha, x)) * to_double(mu(x));
  return s;
}

}  // namespace mhf
