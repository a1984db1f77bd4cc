#include <gtest/gtest.h>

#include <random>

#include "mhf/characters.hpp"
#include "mhf/group.hpp"
#include "mhf/measure.hpp"

using namespace mhf;

namespace {

std::vector<int> sizes_of(const FiniteGroup& g) { return g.classes().size; }

TEST(Builtins, OrdersAndClassCounts) {
  struct Row {
    const char* name;
    int order, classes;
  };
  for (auto r : {Row{"Z2", 2, 2}, Row{"Z3", 3, 3}, Row{"Z4", 4, 4}, Row{"Z6", 6, 6}, Row{"S3", 6, 3}, Row{"S4", 24, 5},
                 Row{"A4", 12, 4}, Row{"D4", 8, 5}, Row{"Q8", 8, 5}}) {
    auto g = FiniteGroup::builtin(r.name);
    EXPECT_EQ(g->size(), r.order) << r.name;
    EXPECT_EQ(g->class_count(), r.classes) << r.name;
    EXPECT_EQ(g->identity(), 0);
  }
  EXPECT_THROW(FiniteGroup::builtin("Z5"), InputError);
}

TEST(Builtins, DocumentedClassOrderings) {
  auto s3 = FiniteGroup::builtin("S3");
  EXPECT_EQ(sizes_of(*s3), (std::vector<int>{1, 3, 2}));
  EXPECT_EQ(s3->classes().members[1], (std::vector<Element>{*s3->find("021"), *s3->find("102"), *s3->find("210")}));
  auto q8 = FiniteGroup::builtin("Q8");
  EXPECT_EQ(sizes_of(*q8), (std::vector<int>{1, 1, 2, 2, 2}));
  EXPECT_EQ(q8->mul(*q8->find("i"), *q8->find("j")), *q8->find("k"));
  EXPECT_EQ(q8->mul(*q8->find("i"), *q8->find("i")), *q8->find("-1"));
  auto d4 = FiniteGroup::builtin("D4");
  EXPECT_EQ(sizes_of(*d4), (std::vector<int>{1, 2, 1, 2, 2}));
  EXPECT_EQ(d4->classes().members[1], (std::vector<Element>{1, 3}));
  EXPECT_EQ(d4->classes().members[3], (std::vector<Element>{4, 6}));
  auto s4 = FiniteGroup::builtin("S4");
  auto sz = sizes_of(*s4);
  std::sort(sz.begin(), sz.end());
  EXPECT_EQ(sz, (std::vector<int>{1, 3, 6, 6, 8}));
}

TEST(Builtins, PermutationProductIsComposition) {
  auto s3 = FiniteGroup::builtin("S3");
  for (Element p = 0; p < 6; ++p) {
    for (Element q = 0; q < 6; ++q) {
      const auto& lp = s3->label(p);
      const auto& lq = s3->label(q);
      std::string r(3, ' ');
      for (int i = 0; i < 3; ++i) r[static_cast<std::size_t>(i)] = lp[static_cast<std::size_t>(lq[static_cast<std::size_t>(i)] - '0')];
      EXPECT_EQ(s3->label(s3->mul(p, q)), r);
    }
  }
}

TEST(Builtins, AssociativityOnRandomTriples) {
  std::mt19937 rng(17);
  for (const auto& name : FiniteGroup::builtin_names()) {
    auto g = FiniteGroup::builtin(name);
    std::uniform_int_distribution<int> pick(0, g->size() - 1);
    for (int i = 0; i < 2000; ++i) {
      Element a = pick(rng), b = pick(rng), c = pick(rng);
      ASSERT_EQ(g->mul(g->mul(a, b), c), g->mul(a, g->mul(b, c))) << name;
    }
  }
}

TEST(FromTable, RejectsBadTables) {
  EXPECT_THROW(FiniteGroup::from_table({}), InputError);
  EXPECT_THROW(FiniteGroup::from_table({{0, 1}, {1}}), InputError);
  EXPECT_THROW(FiniteGroup::from_table({{0, 1}, {1, 2}}), InputError);
  EXPECT_THROW(FiniteGroup::from_table({{1, 0}, {0, 1}}), InputError);  // 0 is not the identity
  EXPECT_THROW(FiniteGroup::from_table({{0, 1}, {1, 1}}), InputError);  // no inverse
  // a Latin square with identity that is not associative
  std::vector<std::vector<Element>> loop{{0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}};
  EXPECT_THROW(FiniteGroup::from_table(loop), InputError);
  EXPECT_THROW(FiniteGroup::from_table({{0, 1}, {1, 0}}, {"only one"}), InputError);
}

TEST(FromTable, AcceptsRelabelledCyclicGroup) {
  auto g = FiniteGroup::from_table({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}, {"e", "x", "x2"}, "C3");
  EXPECT_EQ(g->inv(1), 2);
  EXPECT_EQ(*g->find("x2"), 2);
  EXPECT_TRUE(g->is_abelian());
  EXPECT_TRUE(g->same_law(*FiniteGroup::builtin("Z3")));
}

TEST(Classes, PartitionAndConjugationInvariance) {
  for (const auto& name : FiniteGroup::builtin_names()) {
    auto g = FiniteGroup::builtin(name);
    const auto& cls = g->classes();
    int total = 0;
    for (int c = 0; c < cls.count; ++c) {
      total += cls.size[static_cast<std::size_t>(c)];
      EXPECT_EQ(cls.representative[static_cast<std::size_t>(c)], cls.members[static_cast<std::size_t>(c)].front());
      EXPECT_EQ(g->size() % cls.size[static_cast<std::size_t>(c)], 0);
    }
    EXPECT_EQ(total, g->size());
    for (Element x = 0; x < g->size(); ++x) {
      for (Element y = 0; y < g->size(); ++y) EXPECT_EQ(g->class_of(g->conjugate(y, x)), g->class_of(x));
      EXPECT_EQ(g->class_of(g->inv(x)), cls.inverse_class[static_cast<std::size_t>(g->class_of(x))]);
    }
  }
}

TEST(Subgroups, GeneratedAndCentralizer) {
  auto s3 = FiniteGroup::builtin("S3");
  std::vector<Element> three{*s3->find("120")};
  EXPECT_EQ(s3->generated_subgroup(three).size(), 3u);
  std::vector<Element> both{*s3->find("120"), *s3->find("021")};
  EXPECT_EQ(s3->generated_subgroup(both).size(), 6u);
  EXPECT_EQ(s3->centralizer(both).size(), 1u);
  EXPECT_EQ(s3->centralizer(std::vector<Element>{}).size(), 6u);
}

TEST(Characters, OrthogonalityForAllBuiltins) {
  for (const auto& name : FiniteGroup::builtin_names()) {
    auto g = FiniteGroup::builtin(name);
    auto t = character_table(g);
    EXPECT_EQ(t.count(), g->class_count()) << name;
    EXPECT_LE(t.orthogonality_defect(), 1e-9) << name;
    EXPECT_EQ(t.dim[0], 1);
    for (int c = 0; c < t.count(); ++c) EXPECT_NEAR(t.chi[0][static_cast<std::size_t>(c)].real(), 1.0, 1e-12);
  }
}

TEST(Characters, KnownDimensionsAndIndicators) {
  auto s3 = character_table(FiniteGroup::builtin("S3"));
  EXPECT_EQ(s3.dim, (std::vector<int>{1, 1, 2}));
  EXPECT_EQ(s3.fs, (std::vector<int>{1, 1, 1}));
  auto q8 = character_table(FiniteGroup::builtin("Q8"));
  EXPECT_EQ(q8.dim, (std::vector<int>{1, 1, 1, 1, 2}));
  EXPECT_EQ(q8.fs.back(), -1);
  auto d4 = character_table(FiniteGroup::builtin("D4"));
  EXPECT_EQ(d4.fs, (std::vector<int>{1, 1, 1, 1, 1}));
  auto z3 = character_table(FiniteGroup::builtin("Z3"));
  EXPECT_EQ(z3.fs, (std::vector<int>{1, 0, 0}));
  auto s4 = character_table(FiniteGroup::builtin("S4"));
  EXPECT_EQ(s4.dim, (std::vector<int>{1, 1, 2, 3, 3}));
}

TEST(Measures, ValidationAndBasicAlgebra) {
  auto s3 = FiniteGroup::builtin("S3");
  EXPECT_THROW(MeasureD(s3, {1, 0, 0, 0, 0}), InputError);
  EXPECT_THROW(MeasureD(s3, {1, 1, 0, 0, 0, 0}), InputError);  // not class-constant
  EXPECT_THROW(MeasureD(s3, {-1, 0, 0, 0, 0, 0}), InputError);
  EXPECT_THROW(delta_class(s3, 3), InputError);
  auto u = MeasureQ::uniform(s3);
  EXPECT_TRUE(u.is_probability());
  EXPECT_EQ(convolve(u, delta_class(s3, 2)), u);
  auto a = delta_class(s3, 1), b = delta_class(s3, 2);
  EXPECT_EQ(convolve(a, b), convolve(b, a));
  EXPECT_EQ(convolve(convolve(a, b), a), convolve(a, convolve(b, a)));
  EXPECT_EQ(convolution_power(a, 0), delta_class(s3, 0));
}

// κ and η by direct counting of squares and commutators.
TEST(Measures, KappaEtaByCounting) {
  for (const auto& name : FiniteGroup::builtin_names()) {
    auto g = FiniteGroup::builtin(name);
    const int n = g->size();
    std::vector<int> sq(static_cast<std::size_t>(n), 0), cm(static_cast<std::size_t>(n), 0);
    for (Element x = 0; x < n; ++x) {
      ++sq[static_cast<std::size_t>(g->mul(x, x))];
      for (Element y = 0; y < n; ++y) ++cm[static_cast<std::size_t>(g->commutator(x, y))];
    }
    auto kappa = kappa_measure(g), eta = eta_measure(g);
    for (Element x = 0; x < n; ++x) {
      EXPECT_EQ(kappa(x), Rational(sq[static_cast<std::size_t>(x)], n)) << name;
      EXPECT_EQ(eta(x), Rational(cm[static_cast<std::size_t>(x)], n * n)) << name;
    }
  }
  auto s3 = FiniteGroup::builtin("S3");
  auto k = kappa_measure(s3);
  EXPECT_EQ(k(0), Rational(2, 3));
  EXPECT_EQ(k(*s3->find("021")), Rational(0));
  EXPECT_EQ(k(*s3->find("120")), Rational(1, 6));
}

TEST(Measures, KappaEtaIdentities) {
  for (const auto& name : FiniteGroup::builtin_names()) {
    auto g = FiniteGroup::builtin(name);
    auto kappa = kappa_measure(g), eta = eta_measure(g);
    EXPECT_EQ(convolve(kappa, eta), convolution_power(kappa, 3)) << name;
    EXPECT_TRUE(eta.inversion_invariant());
    auto t = character_table(g);
    for (int a = 0; a < t.count(); ++a) {
      EXPECT_NEAR(std::abs(fourier_coefficient(eta, t, a) - Complex(1.0 / t.dim[static_cast<std::size_t>(a)])), 0.0, 1e-9) << name;
      EXPECT_NEAR(std::abs(fourier_coefficient(kappa, t, a) - Complex(t.fs[static_cast<std::size_t>(a)])), 0.0, 1e-9) << name;
    }
    if (g->is_abelian()) EXPECT_EQ(eta, delta_class(g, 0));
  }
}

TEST(Densities, ConvolutionOfUniformIsUniform) {
  auto g = FiniteGroup::builtin("Q8");
  auto one = ClassDensity::constant(g, 1.0);
  auto f = ClassDensity::from_measure(delta_class(g, 2).to_double());
  EXPECT_LE(density_convolve(one, f).max_abs_diff(one), 1e-14);
  EXPECT_TRUE(f.is_probability());
}

}  // namespace
