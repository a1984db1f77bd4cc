#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "mhf/covering.hpp"
#include "oracles.hpp"

using namespace mhf;

namespace {

GroupPtr S3() { return FiniteGroup::builtin("S3"); }

// Number of tuples in H by direct nested enumeration over a, c and all of d.
std::size_t brute_count(const FiniteGroup& g, const SurfaceSpec& s, int k) {
  const int n = g.size();
  const int slots = s.genus + s.p() + k;
  std::size_t total = 1, count = 0;
  for (int i = 0; i < slots; ++i) total *= static_cast<std::size_t>(n);
  std::vector<Element> v(static_cast<std::size_t>(slots));
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (auto& x : v) {
      x = static_cast<Element>(c % static_cast<std::size_t>(n));
      c /= static_cast<std::size_t>(n);
    }
    Element r = g.identity();
    bool ok = true;
    for (int i = 0; i < s.genus; ++i) {
      Element x = v[static_cast<std::size_t>(i)];
      if (s.orientable) {
        if (i % 2 == 1) r = g.mul(r, g.commutator(v[static_cast<std::size_t>(i - 1)], x));
      } else {
        r = g.mul(r, g.mul(x, x));
      }
    }
    for (int i = 0; i < s.p(); ++i) {
      Element x = v[static_cast<std::size_t>(s.genus + i)];
      if (g.class_of(x) != s.boundary_classes[static_cast<std::size_t>(i)]) ok = false;
      r = g.mul(r, x);
    }
    for (int i = 0; i < k; ++i) {
      Element x = v[static_cast<std::size_t>(s.genus + s.p() + i)];
      if (x == g.identity()) ok = false;
      r = g.mul(r, x);
    }
    if (ok && r == g.identity()) ++count;
  }
  return count;
}

TEST(Enumeration, SmallExamples) {
  auto g = S3();
  SurfaceSpec sphere{true, 0, {}, 1.0};
  EXPECT_EQ(enumerate_H(g, sphere, 0).size(), 1u);
  EXPECT_EQ(enumerate_H(g, sphere, 1).size(), 0u);
  EXPECT_EQ(enumerate_H(g, sphere, 2).size(), 5u);
  EXPECT_EQ(enumerate_H(g, SurfaceSpec{true, 2, {}, 1.0}, 0).size(), 18u);
  EXPECT_EQ(enumerate_H(FiniteGroup::builtin("Z2"), sphere, 3).size(), 0u);
  EXPECT_THROW(enumerate_H(g, SurfaceSpec{true, 8, {}, 1.0}, 0, 1e5), CapExceeded);
  EXPECT_THROW(enumerate_H(g, sphere, -1), InputError);
}

TEST(Enumeration, AgreesWithBruteForce) {
  for (const char* name : {"Z3", "S3"}) {
    auto g = FiniteGroup::builtin(name);
    for (auto s : {SurfaceSpec{true, 0, {}, 1.0}, SurfaceSpec{true, 2, {}, 1.0}, SurfaceSpec{false, 1, {}, 1.0},
                   SurfaceSpec{false, 2, {1}, 1.0}, SurfaceSpec{true, 0, {1, 2}, 1.0}}) {
      for (int k = 0; k <= 3; ++k) {
        auto H = enumerate_H(g, s, k);
        EXPECT_EQ(H.size(), brute_count(*g, s, k)) << name << " " << s.describe() << " k=" << k;
        std::set<std::vector<Element>> distinct;
        for (const auto& t : H) {
          EXPECT_TRUE(satisfies_relation(*g, t));
          EXPECT_EQ(t.k(), k);
          distinct.insert(t.entries());
        }
        EXPECT_EQ(distinct.size(), H.size());
        for (std::size_t i = 1; i < H.size(); ++i) EXPECT_LT(H[i - 1].entries(), H[i].entries());
      }
    }
  }
}

TEST(Automorphisms, CentralizerOrders) {
  auto g = S3();
  MonodromyTuple trivial{true, 0, {}, {}, {}, {}};
  EXPECT_EQ(aut_order(*g, trivial), 6);
  MonodromyTuple mixed{true, 0, {}, {}, {}, {*g->find("021"), *g->find("120")}};
  EXPECT_EQ(aut_order(*g, mixed), 1);
  MonodromyTuple cyc{true, 0, {}, {}, {}, {*g->find("120"), *g->find("201")}};
  EXPECT_EQ(aut_order(*g, cyc), 3);
  EXPECT_TRUE(satisfies_relation(*g, cyc));
}

TEST(Counting, OrbitFormulaIsExact) {
  for (const char* name : {"Z2", "S3", "Q8"}) {
    auto g = FiniteGroup::builtin(name);
    for (auto s : {SurfaceSpec{true, 0, {}, 1.0}, SurfaceSpec{true, 2, {}, 1.0}, SurfaceSpec{false, 1, {}, 1.0}}) {
      for (int k = 0; k <= 3; ++k) {
        if (s.genus == 2 && k == 3 && g->size() > 6) continue;
        auto one = counting_check(g, s, k, [](const MonodromyTuple&) { return Rational(1); });
        EXPECT_TRUE(one.equal()) << name << " " << s.describe() << " k=" << k;
        auto gen = counting_check(g, s, k, [&](const MonodromyTuple& t) {
          auto e = t.entries();
          return Rational(static_cast<long long>(g->generated_subgroup(e).size()));
        });
        EXPECT_TRUE(gen.equal()) << name << " " << s.describe() << " k=" << k;
        EXPECT_EQ(one.tuples, enumerate_H(g, s, k).size());
      }
    }
  }
  auto g = S3();
  EXPECT_THROW(counting_check(g, SurfaceSpec{true, 0, {}, 1.0}, 2,
                              [](const MonodromyTuple& t) { return Rational(static_cast<long long>(t.d[0])); }),
               InputError);
}

TEST(Counting, AutomorphismOrderIsConstantOnOrbits) {
  auto g = S3();
  for (const auto& t : enumerate_H(g, SurfaceSpec{true, 0, {}, 1.0}, 3)) {
    for (Element x = 0; x < 6; ++x) EXPECT_EQ(aut_order(*g, conjugate_tuple(*g, t, x)), aut_order(*g, t));
  }
}

TEST(Mass, FixedKExamples) {
  auto g = S3();
  auto pi = JumpMeasure::on_class(g, 1, 1.0);
  // sphere, k = 2: tuples (d, d⁻¹) weighted by Π₁(d)Π₁(d⁻¹), times n
  double w = 0.0;
  for (Element d = 1; d < 6; ++d) w += pi(d) * pi(g->inv(d));
  EXPECT_NEAR(bb_mass(pi, SurfaceSpec{true, 0, {}, 1.0}, 2), 6 * w, 1e-14);
  EXPECT_NEAR(bb_mass(pi, SurfaceSpec{true, 0, {}, 1.0}, 2), 2.0, 1e-14);
  EXPECT_NEAR(bb_mass(pi, SurfaceSpec{true, 0, {}, 1.0}, 0), 6.0, 1e-14);
  auto z2 = FiniteGroup::builtin("Z2");
  auto pz = JumpMeasure::uniform_nonidentity(z2, 1.0);
  for (int k = 0; k <= 6; ++k) EXPECT_NEAR(bb_mass(pz, SurfaceSpec{true, 0, {}, 1.0}, k), k % 2 == 0 ? 2.0 : 0.0, 1e-15);
  auto z3 = FiniteGroup::builtin("Z3");
  EXPECT_THROW(bb_mass(JumpMeasure::on_class(z3, 1, 1.0), SurfaceSpec{false, 1, {}, 1.0}, 1), InputError);
}

TEST(Mass, IntegratedMassIsPoissonAverage) {
  auto g = S3();
  auto pi = JumpMeasure::from_class_rates(g, {0.0, 0.8, 0.4});
  for (auto s : {SurfaceSpec{true, 0, {}, 0.7}, SurfaceSpec{false, 1, {1}, 0.5}, SurfaceSpec{true, 2, {}, 0.4}}) {
    auto integrated = bb_mass_integrated(pi, s, 1e-13);
    const double lambda = pi.total_rate() * s.area;
    const int K = s.genus == 2 ? 6 : 7;
    auto poisson = oracle::poisson_pmf(lambda, K);
    double avg = 0.0, tail = 1.0;
    for (int k = 0; k <= K; ++k) {
      avg += poisson[static_cast<std::size_t>(k)] * bb_mass(pi, s, k);
      tail -= poisson[static_cast<std::size_t>(k)];
    }
    // each fixed-k mass is at most n, so the dropped terms are below n times the tail
    EXPECT_NEAR(integrated.mass, avg, 6.0 * tail + 1e-12) << s.describe();
    EXPECT_NEAR(integrated.mass, partition_formula(s, HeatKernel(pi)), 1e-11) << s.describe();
  }
  auto z2 = FiniteGroup::builtin("Z2");
  for (double t : {0.2, 1.0, 3.0}) {
    EXPECT_NEAR(bb_mass_integrated(JumpMeasure::uniform_nonidentity(z2, 1.0), SurfaceSpec{true, 0, {}, t}).mass,
                1 + std::exp(-2 * t), 1e-12);
  }
}

TEST(Sampler, RamificationCountIsPoissonOnZ3ProjectivePlane) {
  auto z3 = FiniteGroup::builtin("Z3");
  auto pi = JumpMeasure::uniform_nonidentity(z3, 2.0);
  CoveringSampler s(pi, SurfaceSpec{false, 1, {}, 1.0}, 31);
  const int N = 20000, K = 8;
  std::vector<double> counts(K + 1, 0.0);
  for (int i = 0; i < N; ++i) {
    auto out = s.sample();
    EXPECT_TRUE(satisfies_relation(*z3, out.tuple));
    counts[static_cast<std::size_t>(std::min(out.counts[0], K))] += 1;
  }
  auto p = oracle::poisson_pmf(2.0, K);
  std::vector<double> expect(K + 1);
  double rest = 1.0;
  for (int k = 0; k < K; ++k) {
    expect[static_cast<std::size_t>(k)] = N * p[static_cast<std::size_t>(k)];
    rest -= p[static_cast<std::size_t>(k)];
  }
  expect[K] = N * rest;
  EXPECT_GT(oracle::chi_square_p(counts, expect), 1e-4);
  EXPECT_NEAR(s.acceptance_rate(), 1.0 / 3, 0.02);
}

TEST(Sampler, Z2SphereHasEvenRamification) {
  auto z2 = FiniteGroup::builtin("Z2");
  CoveringSampler s(JumpMeasure::uniform_nonidentity(z2, 1.0), SurfaceSpec{true, 0, {}, 1.5}, 5);
  for (int i = 0; i < 500; ++i) EXPECT_EQ(s.sample().counts[0] % 2, 0);
  auto z3 = FiniteGroup::builtin("Z3");
  EXPECT_THROW(CoveringSampler(JumpMeasure::on_class(z3, 1, 1.0), SurfaceSpec{false, 1, {}, 1.0}, 1), InputError);
}

// Empirical law of the tame-generator values against the Poisson-series pmf.
void check_map_sampler(const RibbonMap& m, const GConstraints& c, const JumpMeasure& pi, int N, std::uint64_t seed) {
  MapCoveringSampler s(m, c, pi, seed);
  const auto& tg = s.generators();
  auto ref = monodromy_marginal(m, tg, c, pi).pmf;
  std::vector<double> counts(ref.p.size(), 0.0), expect(ref.p.size());
  for (int i = 0; i < N; ++i) {
    auto out = s.sample();
    std::vector<Element> xs = out.tuple.a;
    xs.insert(xs.end(), out.tuple.c.begin(), out.tuple.c.end());
    xs.insert(xs.end(), out.facial.begin(), out.facial.end() - 1);
    counts[ref.index(xs)] += 1;
  }
  for (std::size_t i = 0; i < ref.p.size(); ++i) expect[i] = N * ref.p[i] / ref.total;
  EXPECT_GT(oracle::chi_square_p(counts, expect), 1e-4);
}

TEST(Sampler, MapSamplerMatchesMonodromyLaw) {
  auto z3 = FiniteGroup::builtin("Z3");
  check_map_sampler(oracle::square_torus_map().with_areas({0.5, 0.5}), {}, JumpMeasure::uniform_nonidentity(z3, 1.0), 20000, 3);
  auto g = S3();
  check_map_sampler(oracle::torus_map().with_areas({0.8}), {}, JumpMeasure::on_class(g, 1, 1.0), 20000, 4);
  check_map_sampler(standard_map(SurfaceSpec{true, 0, {1, 1}, 1.0}), GConstraints{{1, 1}, {}},
                    JumpMeasure::uniform_nonidentity(g, 1.0), 10000, 8);
}

TEST(Sampler, SmallAreaGivesUnramifiedCoverings) {
  auto g = S3();
  MapCoveringSampler s(oracle::torus_map().with_areas({1e-9}), {}, JumpMeasure::uniform_nonidentity(g, 1.0), 12);
  for (int i = 0; i < 200; ++i) {
    auto out = s.sample();
    EXPECT_EQ(out.counts, std::vector<int>{0});
    EXPECT_EQ(out.facial, std::vector<Element>{0});
    EXPECT_EQ(g->commutator(out.tuple.a[0], out.tuple.a[1]), 0);
  }
}

TEST(Marginal, Z2DiskBoundaryLaw) {
  auto z2 = FiniteGroup::builtin("Z2");
  auto pi = JumpMeasure::uniform_nonidentity(z2, 1.0);
  for (double t : {0.5, 1.0}) {
    for (int cls : {0, 1}) {
      auto disk = standard_map(SurfaceSpec{true, 0, {cls}, t});
      GConstraints c{{cls}, {}};
      auto tg = tame_generators(disk);
      auto mm = monodromy_marginal(disk, tg, c, pi).pmf;
      ASSERT_EQ(mm.k, 1);
      EXPECT_NEAR(mm.p[static_cast<std::size_t>(cls)], cls == 0 ? 1 + std::exp(-2 * t) : 1 - std::exp(-2 * t), 1e-12);
      EXPECT_EQ(mm.p[static_cast<std::size_t>(1 - cls)], 0.0);
    }
  }
}

TEST(HoloMono, AgreesOnSeveralMaps) {
  auto g = S3();
  HeatKernel q(JumpMeasure::from_class_rates(g, {0.0, 0.9, 0.3}));
  std::vector<std::pair<RibbonMap, GConstraints>> cases{
      {oracle::torus_map().with_areas({1.0}), {}},
      {oracle::square_torus_map().with_areas({0.3, 0.6}), {}},
      {oracle::klein_map().with_areas({0.7}), {}},
      {standard_map(SurfaceSpec{true, 0, {1, 2}, 1.0}), GConstraints{{1, 2}, {}}},
      {oracle::theta_map().with_areas({0.2, 0.3, 0.5}), {}}};
  for (const auto& [m, c] : cases) {
    auto rep = verify_holo_mono(m, c, q);
    EXPECT_TRUE(rep.pass) << rep.max_abs_diff;
    EXPECT_LE(rep.max_abs_diff, 1e-9);
    EXPECT_LE(rep.tail_bound, 1e-10);
  }
  auto z3 = FiniteGroup::builtin("Z3");
  HeatKernel one_sided(JumpMeasure::on_class(z3, 1, 1.0));
  EXPECT_THROW(verify_holo_mono(oracle::projective_map().with_areas({1.0}), {}, one_sided), InputError);
  EXPECT_TRUE(verify_holo_mono(oracle::torus_map().with_areas({1.0}), {}, one_sided).pass);
}

}  // namespace
