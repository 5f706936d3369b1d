#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "echkit/index.hpp"
#include "echkit/oracles.hpp"
#include "echkit/partitions.hpp"

using namespace echkit;

namespace {

using Parts = std::vector<long long>;

Parts pplus(const std::string& theta, long long m) { return positive_partition(parse_real(theta), m).partition.parts; }
Parts pminus(const std::string& theta, long long m) { return negative_partition(parse_real(theta), m).partition.parts; }

RealScalar random_irrational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-40, 40), den(1, 12), rad(2, 19);
  for (;;) {
    auto x = RealScalar::quadratic(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), rad(rng));
    if (x.kind() == RealScalar::Kind::quadratic) return x;
  }
}

WeightedChernModel ellipsoid_like() {
  WeightedChernModel w;
  w.orbits.add(make_orbit("g1", RealScalar(1), parse_real("1/sqrt2"), OrbitType::elliptic));
  w.orbits.add(make_orbit("g2", parse_real("sqrt2"), parse_real("sqrt2"), OrbitType::elliptic));
  w.weights = {{"g1", Rational(1)}, {"g2", Rational(1)}};
  w.q = {{0, 1}, {1, 0}};
  return w;
}

}  // namespace

TEST(Partitions, Examples) {
  EXPECT_EQ(pplus("2", 4), (Parts{1, 1, 1, 1}));
  EXPECT_EQ(pplus("sqrt2", 1), (Parts{1}));
  EXPECT_EQ(pplus("sqrt2-1", 3), (Parts{3}));
  EXPECT_EQ(pminus("1/2", 5), (Parts{2, 2, 1}));
  EXPECT_EQ(pminus("1/2", 4), (Parts{2, 2}));
  EXPECT_EQ(pminus("sqrt2-1", 3), (Parts{2, 1}));
  EXPECT_THROW(pplus("sqrt2", 0), PreconditionError);
}

TEST(Partitions, PathShape) {
  auto r = positive_partition(parse_real("sqrt2-1"), 12);
  EXPECT_EQ(r.partition.sum(), 12);
  EXPECT_EQ(r.path.end().y, (parse_real("sqrt2-1") * RealScalar(12)).floor_int());
  auto n = negative_partition(parse_real("sqrt2-1"), 12);
  EXPECT_EQ(n.path.end().y, (parse_real("sqrt2-1") * RealScalar(12)).ceil_int());
  // collinear lattice points stay as vertices
  EXPECT_EQ(pplus("1/2", 4), (Parts{2, 2}));
}

TEST(Partitions, AmbiguousThetaIsRejected) {
  EXPECT_THROW(positive_partition(parse_real("0.3333333333333333~"), 3), AmbiguousError);
}

TEST(Partitions, ExceptionalExamples) {
  EXPECT_TRUE(is_exceptional(parse_real("sqrt2-1"), 3));
  EXPECT_FALSE(is_exceptional(parse_real("1/2"), 3));
  EXPECT_TRUE(is_exceptional(parse_real("sqrt7"), 1));
  EXPECT_EQ(exceptional_multiplicities(RealScalar(3), OrbitType::positive_hyperbolic).multiplicities, (Parts{1}));
  EXPECT_EQ(exceptional_multiplicities(parse_real("5/2"), OrbitType::negative_hyperbolic).multiplicities, (Parts{1, 2}));
  auto e = exceptional_multiplicities(parse_real("sqrt2-1"), OrbitType::elliptic);
  EXPECT_EQ(e.multiplicities, (Parts{1, 2, 3}));
  EXPECT_EQ(e.cutoff, 5);
  EXPECT_THROW(exceptional_multiplicities(parse_real("sqrt2"), OrbitType::negative_hyperbolic), PreconditionError);
}

TEST(Partitions, HyperbolicClosedForms) {
  for (long long m = 1; m <= 50; ++m) {
    for (const char* t : {"0", "3", "-2"}) {
      EXPECT_EQ(pplus(t, m), Parts(m, 1));
      EXPECT_EQ(pminus(t, m), Parts(m, 1));
    }
    Parts odd(m / 2, 2);
    if (m % 2) odd.push_back(1);
    EXPECT_EQ(pminus("1/2", m), odd);
    EXPECT_EQ(pplus("1/2", m), odd);
    EXPECT_EQ(pplus("-5/2", m), odd);
  }
}

TEST(Partitions, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    RealScalar theta = random_irrational(rng);
    for (long long m = 1; m <= 14; ++m) {
      EXPECT_EQ(positive_partition(theta, m).partition.parts, oracle::brute_force_partition(theta, m, 1))
          << theta.symbolic() << " m=" << m;
      EXPECT_EQ(negative_partition(theta, m).partition.parts, oracle::brute_force_partition(theta, m, -1))
          << theta.symbolic() << " m=" << m;
    }
  }
}

TEST(Partitions, ReflectionIdentity) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<long long> mm(1, 60);
  for (int trial = 0; trial < 500; ++trial) {
    RealScalar theta = random_irrational(rng);
    long long m = mm(rng);
    EXPECT_EQ(negative_partition(theta, m).partition.parts, positive_partition(-theta, m).partition.parts);
  }
}

TEST(Partitions, RelativelyPrimeAndDisjoint) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    RealScalar theta = random_irrational(rng);
    for (long long m = 1; m <= 60; ++m) {
      auto p = partitions(theta, m);
      if (p.plus.partition.parts == Parts{m}) {
        EXPECT_EQ(std::gcd(m, std::abs((theta * RealScalar(m)).floor_int())), 1);
        EXPECT_TRUE(check_claim(theta, m).holds);
      }
      if (p.minus.partition.parts == Parts{m}) EXPECT_EQ(std::gcd(m, std::abs((theta * RealScalar(m)).ceil_int())), 1);
      if (m >= 2)
        for (long long v : p.plus.partition.parts) EXPECT_FALSE(p.minus.partition.contains(v)) << theta.symbolic();
    }
  }
}

TEST(Partitions, ClaimExamples) {
  auto c = check_claim(parse_real("sqrt2-1"), 3);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.smallest_part, 1);
  EXPECT_EQ(c.determinant_area, Rational(1, 2));
  EXPECT_EQ(c.pick_area, Rational(1, 2));
  EXPECT_EQ(pminus("sqrt2-1", 5), (Parts{2, 2, 1}));
  EXPECT_TRUE(check_claim(parse_real("sqrt2-1"), 5).holds);
  EXPECT_THROW(check_claim(parse_real("sqrt2-1"), 4), PreconditionError);
}

TEST(Partitions, ExceptionalMatchesOverScan) {
  for (const char* t : {"sqrt2-1", "golden-1", "1/pi", "sqrt3", "-sqrt5"}) {
    RealScalar theta = parse_real(t);
    auto e = exceptional_multiplicities(theta, OrbitType::elliptic);
    Parts scan;
    for (long long m = 1; m <= 10 * e.cutoff; ++m)
      if (is_exceptional(theta, m)) scan.push_back(m);
    EXPECT_EQ(e.multiplicities, scan) << t;
  }
}

TEST(Index, CzExamples) {
  EXPECT_EQ(cz_index(parse_real("0.3"), 1), 1);
  EXPECT_EQ(cz_index(RealScalar(2), 3), 12);
  EXPECT_EQ(cz_index(parse_real("sqrt2"), 1), 3);
  EXPECT_THROW(cz_index(parse_real("0.3333333333333333~"), 3), AmbiguousError);
}

TEST(Index, CzParity) {
  for (const char* t : {"sqrt2", "1/2", "3", "-7/2", "golden"})
    for (long long k = 1; k <= 12; ++k) {
      RealScalar theta = parse_real(t);
      bool integral = (theta * RealScalar(k)).is_integer();
      EXPECT_EQ(cz_index(theta, k) % 2 != 0, !integral);
    }
}

TEST(Index, EchAndJ0Examples) {
  auto w = ellipsoid_like();
  RelativeClassData empty;
  EXPECT_EQ(ech_index(empty), 0);
  EXPECT_EQ(j0_index(empty), 0);
  auto d1 = relative_data(OrbitSet{{"g1", 1}}, {}, 1, 0, w.orbits);
  EXPECT_EQ(ech_index(d1), 2);
  EXPECT_EQ(j0_index(d1), -1);
  EXPECT_EQ(ech_index(relative_data(OrbitSet{{"g2", 1}}, {}, 1, 0, w.orbits)), 4);
  EXPECT_EQ(j0_index(relative_data(OrbitSet{{"g1", 2}}, {}, 2, 2, w.orbits)), 1);
  EXPECT_EQ(i_minus_j0(empty).value, 0);
  EXPECT_EQ(i_minus_j0(d1).value, 3);
}

TEST(Index, FredholmExamples) {
  EXPECT_EQ(fredholm_index(0, 1, {1}, {1}), 2);
  EXPECT_EQ(fredholm_index(1, 1, {1}, {}), 2);
  EXPECT_EQ(fredholm_index(0, 0, {5}, {5}), 0);
}

TEST(Index, AbsIndicesAndAdditivity) {
  auto w = ellipsoid_like();
  EXPECT_EQ(abs_indices({}, w).I, 0);
  EXPECT_EQ(abs_indices({}, w).J0, 0);
  auto g1 = abs_indices(OrbitSet{{"g1", 1}}, w);
  EXPECT_EQ(g1.I, 2);
  EXPECT_EQ(g1.J0, -1);
  EXPECT_EQ(abs_indices(OrbitSet{{"g1", 1}, {"g2", 1}}, w).I, 8);
  auto sets = enumerate_orbit_sets(w.orbits, RealScalar(8));
  for (std::size_t i = 0; i < sets.size(); i += 3)
    for (std::size_t j = 0; j < sets.size(); j += 5) {
      auto d = w.relative(sets[i], sets[j]);
      EXPECT_EQ(ech_index(d), abs_indices(sets[i], w).I - abs_indices(sets[j], w).I);
      EXPECT_EQ(j0_index(d), abs_indices(sets[i], w).J0 - abs_indices(sets[j], w).J0);
    }
  WeightedChernModel half = w;
  half.weights["g1"] = Rational(1, 2);
  EXPECT_THROW(abs_indices(OrbitSet{{"g1", 1}}, half), PreconditionError);
}

TEST(Index, Delta1) {
  WeightedChernModel s2;
  s2.orbits.add(make_orbit("e", RealScalar(1), parse_real("0.7000000000000000000001~"), OrbitType::elliptic));
  s2.weights = {{"e", Rational(1, 2)}};
  s2.q = {{0}};
  EXPECT_EQ(delta1_bound(s2), RealScalar(3));
  auto r = verify_delta1(ellipsoid_like(), RealScalar(20));
  EXPECT_GT(r.checked, 100u);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_THROW(delta1_bound(WeightedChernModel{}), PreconditionError);
}

TEST(Index, AmbiguityShift) {
  EXPECT_EQ(ambiguity_shift(0, 0).dI, 0);
  EXPECT_EQ(ambiguity_shift(0, 0).dJ0, 0);
  EXPECT_EQ(ambiguity_shift(3, 1).dI, 5);
  EXPECT_EQ(ambiguity_shift(3, 1).dJ0, -1);
  EXPECT_EQ(ambiguity_shift(-2, 0).dI, -2);
  EXPECT_EQ(ambiguity_shift(-2, 0).dJ0, 2);
}

TEST(Index, FuzzedIdentities) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long long> mult(0, 6), cq(-20, 20);
  OrbitTable t;
  t.add(make_orbit("a", RealScalar(1), parse_real("sqrt2-1"), OrbitType::elliptic));
  t.add(make_orbit("b", RealScalar(2), parse_real("3/2"), OrbitType::negative_hyperbolic));
  t.add(make_orbit("c", RealScalar(3), parse_real("-1"), OrbitType::positive_hyperbolic));
  t.add(make_orbit("d", RealScalar(4), parse_real("golden"), OrbitType::elliptic));
  auto rand_set = [&] {
    OrbitSet s;
    for (const auto& id : t.ids()) s.add(id, mult(rng));
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    OrbitSet a = rand_set(), b = rand_set(), c = rand_set();
    long long c1 = cq(rng), q1 = cq(rng), c2 = cq(rng), q2 = cq(rng);
    auto ab = relative_data(a, b, c1, q1, t), bc = relative_data(b, c, c2, q2, t), ac = relative_data(a, c, c1 + c2, q1 + q2, t);
    EXPECT_NO_THROW(i_minus_j0(ab));
    EXPECT_EQ(ech_index(ab) + ech_index(bc), ech_index(ac));
    EXPECT_EQ(j0_index(ab) + j0_index(bc), j0_index(ac));
  }
}
