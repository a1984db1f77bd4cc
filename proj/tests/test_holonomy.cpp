#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "mhf/holonomy.hpp"
#include "oracles.hpp"

using namespace mhf;

namespace {

GroupPtr S3() { return FiniteGroup::builtin("S3"); }
GroupPtr Z3() { return FiniteGroup::builtin("Z3"); }
GroupPtr Z2() { return FiniteGroup::builtin("Z2"); }

HeatKernel uniform_kernel(const GroupPtr& g) { return HeatKernel(JumpMeasure::uniform_nonidentity(g, 1.0)); }

// Q_t from the matrix-exponential oracle.
std::vector<double> q_ref(const GroupPtr& g, const HeatKernel& q, double t) {
  return oracle::expm_kernel(*g, q.jump().measure().weights(), t);
}

HolonomyConfig random_config(const RibbonMap& m, int n, std::mt19937_64& rng) {
  HolonomyConfig h(static_cast<std::size_t>(m.edge_count()));
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (auto& x : h) x = pick(rng);
  return h;
}

TEST(UniformMeasure, PairOfEdgesIsUniform) {
  auto g = Z3();
  auto m = oracle::square_torus_map();
  std::vector<double> counts(9, 0.0);
  const int N = 9000;
  for (int s = 0; s < N; ++s) {
    auto h = sample_uniform_constrained(g, m, {}, 1000 + static_cast<std::uint64_t>(s));
    counts[static_cast<std::size_t>(3 * h[0] + h[3])] += 1;
  }
  EXPECT_GT(oracle::chi_square_p(counts, std::vector<double>(9, N / 9.0)), 1e-4);
}

TEST(UniformMeasure, BoundaryHolonomyIsUniformOnItsClass) {
  auto g = S3();
  auto disk = standard_map(true, 0, 1);
  GConstraints c{{1}, {}};
  ConstrainedSpace sp(g, disk, c);
  EXPECT_EQ(static_cast<double>(sp.size()), 6.0 * 3.0);
  std::mt19937_64 rng(7);
  std::vector<double> counts(6, 0.0);
  for (int s = 0; s < 6000; ++s) {
    auto h = sp.config(sp.sample_indices(rng));
    Element b = holonomy_of_word(*g, disk, h, EdgeWord{disk.tail(disk.boundary()[0][0]), disk.boundary()[0]});
    ASSERT_EQ(g->class_of(b), 1);
    counts[static_cast<std::size_t>(b)] += 1;
  }
  std::vector<double> expect(6, 0.0);
  for (Element x : g->classes().members[1]) expect[static_cast<std::size_t>(x)] = 2000.0;
  EXPECT_GT(oracle::chi_square_p(counts, expect), 1e-4);
}

TEST(UniformMeasure, TotalMassAndMarkDisintegration) {
  auto g = S3();
  auto q = uniform_kernel(g);
  auto m = oracle::square_torus_map().with_areas({0.4, 0.9});
  EXPECT_NEAR(uniform_constrained_mass(g, m, {}, [](const HolonomyConfig&) { return 1.0; }), 1.0, 1e-14);
  GConstraints marked{{}, {{{4}, 1}}};
  EXPECT_NEAR(uniform_constrained_mass(g, m, marked, [](const HolonomyConfig&) { return 1.0; }), 1.0, 1e-14);
  // averaging the marked measures over the class of the mark recovers the unmarked one
  DfWeight w(m, q);
  auto f = [&](const HolonomyConfig& h) { return w(h) * (h[1] == 0 ? 2.0 : 0.5); };
  double mixed = 0.0;
  for (int c = 0; c < g->class_count(); ++c) {
    GConstraints mc{{}, {{{4}, c}}};
    mixed += g->classes().size[static_cast<std::size_t>(c)] / 6.0 * uniform_constrained_mass(g, m, mc, f);
  }
  EXPECT_NEAR(mixed, uniform_constrained_mass(g, m, {}, f), 1e-12);
}

TEST(UniformMeasure, ConstraintErrors) {
  auto g = S3();
  auto m = oracle::square_torus_map();
  GConstraints overlap{{}, {{{4}, 1}, {{4}, 2}}};
  EXPECT_THROW(ConstrainedSpace(g, m, overlap), InputError);
  EXPECT_THROW(ConstrainedSpace(g, m, GConstraints{{}, {{{0}, 1}}}), InputError);  // not closed
  EXPECT_THROW(ConstrainedSpace(g, m, GConstraints{{}, {{{4}, 3}}}), InputError);
  EXPECT_THROW(ConstrainedSpace(g, m, GConstraints{{1}, {}}), InputError);
  auto big = standard_map(true, 8, 0);
  EXPECT_THROW(uniform_constrained_mass(FiniteGroup::builtin("S4"), big, {}, [](const HolonomyConfig&) { return 1.0; }, 1e6),
               CapExceeded);
}

TEST(HolonomyField, GaugeInvariance) {
  auto g = S3();
  auto q = uniform_kernel(g);
  std::mt19937_64 rng(19);
  for (const auto& base : {oracle::square_torus_map(), oracle::theta_map(), oracle::klein_map()}) {
    auto m = base.with_proportional_areas(1.0);
    DfWeight w(m, q);
    for (int i = 0; i < 100; ++i) {
      auto h = random_config(m, 6, rng);
      std::vector<Element> j;
      for (int v = 0; v < m.vertex_count(); ++v) j.push_back(static_cast<Element>(rng() % 6));
      EXPECT_NEAR(w(gauge_transform(*g, m, h, j)), w(h), 1e-12);
    }
  }
}

TEST(HolonomyField, WeightExamplesAndErrors) {
  auto g = Z2();
  auto q = uniform_kernel(g);
  auto m = oracle::torus_map().with_areas({1.0});
  const double e2 = std::exp(-2.0);
  EXPECT_NEAR(df_weight({0, 0}, m, q), 1 + e2, 1e-13);
  EXPECT_NEAR(df_weight({1, 1}, m, q), 1 + e2, 1e-13);  // abelian: face holonomy is trivial
  auto p = oracle::projective_map().with_areas({1.0});
  EXPECT_NEAR(df_weight({1}, p, q), 1 + e2, 1e-13);  // x² = 0 in Z2
  EXPECT_THROW(df_weight({0, 0}, oracle::torus_map(), q), InputError);
  auto z3 = Z3();
  HeatKernel one_sided(JumpMeasure::on_class(z3, 1, 1.0));
  EXPECT_THROW(DfWeight(p, one_sided), InputError);
  EXPECT_NO_THROW(DfWeight(oracle::torus_map().with_areas({1.0}), one_sided));
}

TEST(Partition, ClosedExamples) {
  const double e2 = std::exp(-2.0);
  auto z2 = Z2();
  auto q2 = uniform_kernel(z2);
  EXPECT_NEAR(partition_graph(oracle::torus_map().with_areas({1.0}), {}, q2), 1 + e2, 1e-13);
  EXPECT_NEAR(partition_graph(oracle::klein_map().with_areas({1.0}), {}, q2), 1 + e2, 1e-13);
  EXPECT_NEAR(partition_graph(oracle::projective_map().with_areas({1.0}), {}, q2), 1 + e2, 1e-13);
  EXPECT_NEAR(partition_formula(SurfaceSpec{false, 2, {}, 1.0}, q2), 1 + e2, 1e-13);

  auto g = S3();
  auto q = uniform_kernel(g);
  // disk with boundary in the transposition class: Q_t(x), x a transposition
  for (double t : {0.5, 1.0}) {
    auto disk = standard_map(SurfaceSpec{true, 0, {1}, t});
    EXPECT_NEAR(partition_graph(disk, GConstraints{{1}, {}}, q), q_ref(g, q, t)[1], 1e-12);
  }
  // sphere cut by a loop into two discs: Q_{t1+t2}(1)
  auto sphere = oracle::planar_loop_map().with_areas({0.3, 0.7});
  EXPECT_NEAR(partition_graph(sphere, {}, q), q_ref(g, q, 1.0)[0], 1e-12);
  EXPECT_NEAR(partition_graph(sphere, {}, q), 2.505971059561011, 1e-12);
}

TEST(Partition, TorusAgainstCommutatorCount) {
  auto g = S3();
  HeatKernel q(JumpMeasure::on_class(g, 1, 1.0));
  const double t = 1.0;
  auto ref = q_ref(g, q, t);
  double z = 0.0;
  for (Element x = 0; x < 6; ++x)
    for (Element y = 0; y < 6; ++y) z += ref[static_cast<std::size_t>(g->commutator(x, y))] / 36.0;
  EXPECT_NEAR(partition_graph(oracle::torus_map().with_areas({t}), {}, q), z, 1e-12);
  EXPECT_NEAR(partition_graph(oracle::square_torus_map().with_areas({0.25, 0.75}), {}, q), z, 1e-12);
  EXPECT_NEAR(partition_formula(SurfaceSpec{true, 2, {}, t}, q), z, 1e-12);
}

TEST(Partition, MeasureM) {
  auto g = S3();
  auto eta = measure_m(g, SurfaceSpec{true, 2, {}, 1.0});
  EXPECT_EQ(eta(0), Rational(1, 2));
  EXPECT_EQ(eta(*g->find("120")), Rational(1, 4));
  EXPECT_EQ(eta(*g->find("021")), Rational(0));
  auto disk = measure_m(g, SurfaceSpec{true, 0, {1}, 1.0});
  EXPECT_EQ(disk(*g->find("102")), Rational(1, 3));
  auto rp2 = measure_m(g, SurfaceSpec{false, 1, {}, 1.0});
  EXPECT_EQ(rp2(0), Rational(2, 3));
  for (auto s : {SurfaceSpec{true, 4, {1, 2}, 1.0}, SurfaceSpec{false, 3, {2}, 1.0}}) {
    EXPECT_TRUE(measure_m(g, s).is_probability());
  }
}

TEST(Partition, FormulaMatchesGraphOnRefinedMaps) {
  for (const char* name : {"Z3", "S3"}) {
    auto g = FiniteGroup::builtin(name);
    auto q = uniform_kernel(g);
    for (auto s : {SurfaceSpec{true, 2, {}, 1.3}, SurfaceSpec{false, 1, {1}, 0.8}, SurfaceSpec{true, 0, {1, 2}, 1.0},
                   SurfaceSpec{false, 2, {}, 2.0}}) {
      auto m = standard_map(s);
      auto sub = subdivide_edge(m, 0).fine;
      auto split = split_face(sub, 0, 0, 2, std::pair{0.4 * s.area, 0.6 * s.area}).fine;
      const double z = partition_formula(s, q);
      EXPECT_NEAR(partition_graph(m, GConstraints::from_spec(s), q), z, 1e-12) << name << " " << s.describe();
      EXPECT_NEAR(partition_graph(split, GConstraints::from_spec(s), q), z, 1e-12) << name << " " << s.describe();
    }
  }
}

TEST(Partition, AdmissibilityErrors) {
  auto g = S3();
  HeatKernel cycles(JumpMeasure::on_class(g, 2, 1.0));
  EXPECT_THROW(partition_formula(SurfaceSpec{true, 2, {}, 1.0}, cycles), InputError);
  auto z3 = Z3();
  HeatKernel one_sided(JumpMeasure::on_class(z3, 1, 1.0));
  EXPECT_THROW(partition_formula(SurfaceSpec{false, 1, {}, 1.0}, one_sided), InputError);
  EXPECT_NO_THROW(partition_formula(SurfaceSpec{true, 2, {}, 1.0}, one_sided));
}

TEST(Surgery, BasicValues) {
  auto g = S3();
  auto q = uniform_kernel(g);
  auto ref = q_ref(g, q, 0.7);
  auto z1 = z_function(true, 1, 0, 0.7, q);
  double mean = 0.0;
  for (int c = 0; c < 3; ++c) {
    Element x = g->classes().representative[static_cast<std::size_t>(c)];
    EXPECT_NEAR(z1({c}), ref[static_cast<std::size_t>(x)], 1e-12);
    mean += g->classes().size[static_cast<std::size_t>(c)] / 6.0 * z1({c});
  }
  EXPECT_NEAR(mean, 1.0, 1e-12);
  EXPECT_NEAR(z_function(true, 0, 0, 0.7, q)({}), ref[0], 1e-12);
  EXPECT_LE(z_function(false, 3, 1, 1.0, q).symmetry_defect(), 1e-12);
  EXPECT_THROW(upsilon(z_function(true, 0, 0, 1.0, q)), InputError);
  EXPECT_THROW(beta1(z1), InputError);
  EXPECT_THROW(z1({0, 1}), InputError);
}

TEST(Surgery, GluingIdentities) {
  auto g = S3();
  HeatKernel q(JumpMeasure::from_class_rates(g, {0.0, 0.7, 0.5}));
  for (int p = 0; p <= 2; ++p) {
    EXPECT_LE(upsilon(z_function(true, p + 1, 0, 1.0, q)).max_abs_diff(z_function(false, p, 1, 1.0, q)), 1e-12);
    EXPECT_LE(upsilon(z_function(false, p + 1, 1, 1.0, q)).max_abs_diff(z_function(false, p, 2, 1.0, q)), 1e-12);
    EXPECT_LE(beta1(z_function(true, p + 2, 0, 0.5, q)).max_abs_diff(z_function(true, p, 2, 0.5, q)), 1e-12);
    EXPECT_LE(beta1(z_function(false, p + 2, 1, 0.5, q)).max_abs_diff(z_function(false, p, 3, 0.5, q)), 1e-12);
    EXPECT_LE(beta2(z_function(true, p + 1, 0, 0.5, q), z_function(false, 2, 1, 1.0, q))
                  .max_abs_diff(z_function(false, p + 1, 1, 1.5, q)),
              1e-12);
  }
}

TEST(Marginals, TorusPairLaw) {
  auto g = S3();
  auto q = uniform_kernel(g);
  auto m = oracle::torus_map().with_areas({1.0});
  auto ref = q_ref(g, q, 1.0);
  auto pmf = marginal_generators(m, {}, {EdgeWord{0, {0}}, EdgeWord{0, {2}}}, g, &q);
  for (Element x = 0; x < 6; ++x)
    for (Element y = 0; y < 6; ++y)
      EXPECT_NEAR(pmf.p[pmf.index({x, y})], ref[static_cast<std::size_t>(g->commutator(x, y))] / 36.0, 1e-13);
  EXPECT_NEAR(pmf.total, partition_formula(SurfaceSpec{true, 2, {}, 1.0}, q), 1e-12);
  auto unweighted = marginal_generators(m, {}, {EdgeWord{0, {0}}}, g);
  for (double v : unweighted.p) EXPECT_NEAR(v, 1.0 / 6, 1e-15);
}

TEST(Marginals, ClosedFormAndSubdivisionInvariance) {
  auto g = S3();
  auto q = uniform_kernel(g);
  for (auto s : {SurfaceSpec{true, 2, {}, 1.0}, SurfaceSpec{false, 2, {}, 1.0}, SurfaceSpec{true, 0, {1, 2}, 1.0},
                 SurfaceSpec{false, 1, {1}, 1.0}}) {
    auto m = standard_map(s);
    auto c = GConstraints::from_spec(s);
    auto tg = tame_generators(m);
    auto brute = marginal_generators(m, c, tg.basis(), g, &q);
    EXPECT_LE(brute.max_abs_diff(tame_closed_form(m, tg, c, q)), 1e-13) << s.describe();
    auto r1 = subdivide_edge(m, 0);
    auto r2 = split_face(r1.fine, 0, 0, 2, std::pair{0.5, 0.5});
    auto ref = compose(r1, r2);
    auto fine_tg = refine_generators(tg, m, ref);
    std::vector<EdgeWord> coarse_gens(fine_tg.a.begin(), fine_tg.a.end());
    coarse_gens.insert(coarse_gens.end(), fine_tg.c.begin(), fine_tg.c.end());
    std::vector<EdgeWord> coarse_orig(tg.a.begin(), tg.a.end());
    coarse_orig.insert(coarse_orig.end(), tg.c.begin(), tg.c.end());
    auto fine = marginal_generators(ref.fine, c, coarse_gens, g, &q);
    auto coarse = marginal_generators(m, c, coarse_orig, g, &q);
    EXPECT_LE(fine.max_abs_diff(coarse), 1e-13) << s.describe();
    auto fine_basis = marginal_generators(ref.fine, c, fine_tg.basis(), g, &q);
    EXPECT_LE(fine_basis.max_abs_diff(tame_closed_form(ref.fine, fine_tg, c, q)), 1e-13) << s.describe();
  }
}

TEST(Sampling, TwoDiscSphereLaw) {
  auto g = S3();
  HeatKernel q(JumpMeasure::from_class_rates(g, {0.0, 1.0, 0.3}));
  const double t1 = 0.3, t2 = 0.5;
  auto m = oracle::planar_loop_map().with_areas({t1, t2});
  auto a = q_ref(g, q, t1), b = q_ref(g, q, t2);
  std::vector<double> law(6);
  double total = 0.0;
  for (Element x = 0; x < 6; ++x) total += law[static_cast<std::size_t>(x)] = a[static_cast<std::size_t>(x)] * b[static_cast<std::size_t>(g->inv(x))];
  DfSampler s(m, {}, q, 42);
  EXPECT_TRUE(s.exact());
  const int N = 20000;
  std::vector<double> counts(6, 0.0), expect(6);
  for (int i = 0; i < N; ++i) counts[static_cast<std::size_t>(s.sample()[0])] += 1;
  for (std::size_t x = 0; x < 6; ++x) expect[x] = N * law[x] / total;
  EXPECT_GT(oracle::chi_square_p(counts, expect), 1e-4);
}

TEST(Sampling, LargeTimeIsUniform) {
  auto g = S3();
  auto q = uniform_kernel(g);
  auto m = oracle::torus_map().with_areas({50.0});
  DfSampler s(m, {}, q, 9);
  const int N = 7200;
  std::vector<double> counts(36, 0.0);
  for (int i = 0; i < N; ++i) {
    auto h = s.sample();
    counts[static_cast<std::size_t>(6 * h[0] + h[1])] += 1;
  }
  EXPECT_GT(oracle::chi_square_p(counts, std::vector<double>(36, N / 36.0)), 1e-4);
}

TEST(Sampling, SeededDeterminism) {
  auto g = S3();
  auto q = uniform_kernel(g);
  auto m = oracle::square_torus_map().with_areas({0.5, 0.5});
  for (bool heat : {false, true}) {
    DfSampler a(m, {}, q, 123, 5, heat), b(m, {}, q, 123, 5, heat);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(a.sample(), b.sample());
  }
  EXPECT_EQ(sample_df(m, {}, q, 77), sample_df(m, {}, q, 77));
}

// One sweep of the heat bath on the 81 states of the square torus over Z3
// leaves the holonomy-field law invariant.
TEST(Sampling, HeatBathSweepPreservesTheLaw) {
  auto g = Z3();
  HeatKernel q(JumpMeasure::on_class(g, 1, 1.0));
  auto m = oracle::square_torus_map().with_areas({0.5, 0.5});
  DfSampler s(m, {}, q, 1, 1, true);
  ASSERT_FALSE(s.exact());
  const auto& sp = s.space();
  ASSERT_EQ(sp.slot_count(), 4u);
  const int S = 81;
  auto decode = [](int i) {
    std::vector<int> st(4);
    for (int k = 0; k < 4; ++k) {
      st[static_cast<std::size_t>(k)] = i % 3;
      i /= 3;
    }
    return st;
  };
  auto encode = [](const std::vector<int>& st) {
    int i = 0;
    for (int k = 3; k >= 0; --k) i = 3 * i + st[static_cast<std::size_t>(k)];
    return i;
  };
  DfWeight w(m, q);
  Eigen::RowVectorXd pi(S);
  for (int i = 0; i < S; ++i) pi(i) = w(sp.config(decode(i)));
  pi /= pi.sum();
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(S, S);
  for (std::size_t k = 0; k < 4; ++k) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(S, S);
    for (int i = 0; i < S; ++i) {
      auto st = decode(i);
      auto cond = s.conditional(st, k);
      for (int v = 0; v < 3; ++v) {
        st[k] = v;
        K(i, encode(st)) += cond[static_cast<std::size_t>(v)];
      }
    }
    P = P * K;
  }
  EXPECT_LE((pi * P - pi).cwiseAbs().maxCoeff(), 1e-14);
  for (int i = 0; i < S; ++i) EXPECT_NEAR(P.row(i).sum(), 1.0, 1e-13);
}

TEST(Sampling, HeatBathMatchesExactLaw) {
  auto g = S3();
  auto q = uniform_kernel(g);
  auto m = oracle::torus_map().with_areas({0.3});
  DfSampler chain(m, {}, q, 2024, kHeatBathSweeps, true);
  auto ref = q_ref(g, q, 0.3);
  std::vector<double> law(36);
  for (Element x = 0; x < 6; ++x)
    for (Element y = 0; y < 6; ++y) law[static_cast<std::size_t>(6 * x + y)] = ref[static_cast<std::size_t>(g->commutator(x, y))];
  double total = 0.0;
  for (double v : law) total += v;
  const int N = 4000;
  std::vector<double> counts(36, 0.0), expect(36);
  for (int i = 0; i < N; ++i) {
    auto h = chain.sample();
    counts[static_cast<std::size_t>(6 * h[0] + h[1])] += 1;
  }
  for (std::size_t i = 0; i < 36; ++i) expect[i] = N * law[i] / total;
  EXPECT_GT(oracle::chi_square_p(counts, expect), 1e-4);
}

}  // namespace
