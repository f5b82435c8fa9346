#include "doctest.h"

#include <random>
#include <set>

#include "super2vec/cochain.hpp"
#include "super2vec/linalg.hpp"

using namespace super2vec;
using Q = Rational;

namespace {

Mat<Q> qmat(int r, int c, std::initializer_list<long> xs) {
  Mat<Q> m(r, c);
  auto it = xs.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = Q(*it++);
  return m;
}

// Independent oracle: |Z^n| / |B^n| over Z/2 by enumerating all cochains.
long brute_mod2_order(const NervePtr& n, int degree) {
  const int cnt = n->count(degree);
  long cocycles = 0;
  for (long mask = 0; mask < (1L << cnt); ++mask) {
    AbelianCochain c = AbelianCochain::zero(n, degree, 2);
    for (int i = 0; i < cnt; ++i) c.values[i] = (mask >> i) & 1;
    if (is_cocycle(c)) ++cocycles;
  }
  std::set<std::vector<long>> bounds;
  const int prev = degree > 0 ? n->count(degree - 1) : 0;
  if (degree == 0) return cocycles;
  for (long mask = 0; mask < (1L << prev); ++mask) {
    AbelianCochain c = AbelianCochain::zero(n, degree - 1, 2);
    for (int i = 0; i < prev; ++i) c.values[i] = (mask >> i) & 1;
    bounds.insert(coboundary(c).values);
  }
  return cocycles / static_cast<long>(bounds.size());
}

long group_order(const CohomologyGroup& g) {
  long o = 1;
  for (const auto& x : g.orders) o *= x.get_si();
  return o;
}

}  // namespace

TEST_CASE("rational parsing and canonical form") {
  CHECK_THROWS(Q::parse("6/-4"));
  CHECK(Q::parse("-6/4") == Q(-3) / Q(2));
  CHECK(Q::parse("-6/4").to_string() == "-3/2");
  CHECK(Q::parse("7").to_string() == "7/1");
  CHECK_THROWS(Q::parse("1/0"));
  CHECK_THROWS(Q::parse("abc"));
  Gaussian z(Q(1), Q(2));
  CHECK(z * z.conj() == Gaussian(Q(5)));
  CHECK((z / z).is_one());
}

TEST_CASE("solve_linear examples") {
  Vec<Q> b(3);
  b << Q(1), Q(2), Q(3);
  auto s = solve_linear<Q>(identity<Q>(3), b);
  REQUIRE(s.particular);
  CHECK(*s.particular == b);
  CHECK(s.kernel.cols() == 0);

  auto z = solve_linear<Q>(Mat<Q>::Zero(2, 2), Vec<Q>::Zero(2));
  REQUIRE(z.particular);
  CHECK(is_zero_vec<Q>(*z.particular));
  CHECK(z.kernel.cols() == 2);

  Vec<Q> b2(2);
  b2 << Q(1), Q(3);
  CHECK_FALSE(solve_linear<Q>(qmat(2, 2, {1, 1, 2, 2}), b2).particular.has_value());
}

TEST_CASE("solve_linear property on random systems") {
  Rng rng(7);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    int r = dim(rng), c = dim(rng);
    Mat<Q> a(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) a(i, j) = (trial % 3 == 0 && j == 0) ? Q(0) : Field<Q>::sample(rng);
    Vec<Q> x(c);
    for (int j = 0; j < c; ++j) x(j) = Field<Q>::sample(rng);
    Vec<Q> b = a * x;
    auto s = solve_linear<Q>(a, b);
    REQUIRE(s.particular);
    CHECK(a * *s.particular == b);
    CHECK(is_zero(Mat<Q>(a * s.kernel)));
    CHECK(s.kernel.cols() == c - rank<Q>(a));
  }
}

TEST_CASE("inverse over Q(i)") {
  Mat<Gaussian> m(2, 2);
  m << Gaussian::i(), Gaussian(1), Gaussian(0), Gaussian(2);
  auto inv = inverse<Gaussian>(m);
  REQUIRE(inv);
  CHECK(m * *inv == identity<Gaussian>(2));
}

TEST_CASE("smith normal form") {
  IntMatrix m(2, 2);
  m(0, 0) = 2;
  m(1, 1) = 3;
  auto s = smith_normal_form(m);
  CHECK(s.d(0, 0) == 1);
  CHECK(s.d(1, 1) == 6);
  CHECK(smith_normal_form(IntMatrix::identity(4)).d == IntMatrix::identity(4));
  IntMatrix z(1, 1);
  CHECK(smith_normal_form(z).d.is_zero());
}

TEST_CASE("smith normal form on 1000 random matrices") {
  Rng rng(11);
  std::uniform_int_distribution<int> dim(1, 5), val(-6, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    IntMatrix m(dim(rng), dim(rng));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m(i, j) = val(rng);
    auto s = smith_normal_form(m);
    REQUIRE(s.u * m * s.v == s.d);
    REQUIRE(s.u * s.u_inv == IntMatrix::identity(m.rows()));
    REQUIRE(s.v * s.v_inv == IntMatrix::identity(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (i != j) REQUIRE(s.d(i, j) == 0);
    int k = std::min(m.rows(), m.cols());
    for (int i = 0; i < k; ++i) {
      REQUIRE(s.d(i, i) >= 0);
      if (i + 1 < k && s.d(i, i) != 0) REQUIRE(s.d(i + 1, i + 1) % s.d(i, i) == 0);
      if (s.d(i, i) == 0 && i + 1 < k) REQUIRE(s.d(i + 1, i + 1) == 0);
    }
  }
}

TEST_CASE("nerve shapes") {
  auto rp2 = nerves::rp2();
  CHECK(rp2->count(0) == 6);
  CHECK(rp2->count(1) == 15);
  CHECK(rp2->count(2) == 10);
  for (const auto& e : rp2->simplices(1)) CHECK(rp2->cofaces(e, 2).size() == 2);
  auto t7 = nerves::torus7();
  CHECK(t7->count(1) == 21);
  CHECK(t7->count(2) == 14);
  CHECK(t7->count(3) == 0);
  for (const auto& e : t7->simplices(1)) CHECK(t7->cofaces(e, 2).size() == 2);
  auto t9 = nerves::torus9();
  CHECK(t9->count(3) > 0);
  CHECK_THROWS_WITH(Nerve::from_simplices({{2, 1}}), doctest::Contains("vertices not increasing"));
}

TEST_CASE("cohomology of the sample nerves") {
  auto rp2 = nerves::rp2();
  auto h1 = cohomology_of(rp2, 2, 1);
  REQUIRE(h1.orders.size() == 1);
  CHECK(h1.orders[0] == 2);
  CHECK(group_order(h1) == brute_mod2_order(rp2, 1));
  CHECK(group_order(cohomology_of(rp2, 2, 2)) == brute_mod2_order(rp2, 2));
  auto h2z = cohomology_of(rp2, 0, 2);
  REQUIRE(h2z.orders.size() == 1);
  CHECK(h2z.orders[0] == 2);

  auto t7 = nerves::torus7();
  auto tz = cohomology_of(t7, 0, 1);
  REQUIRE(tz.orders.size() == 2);
  CHECK(tz.orders[0] == 0);
  CHECK(tz.orders[1] == 0);
  CHECK(cohomology_of(t7, 2, 1).orders.size() == 2);

  auto t9 = nerves::torus9();
  auto t9z1 = cohomology_of(t9, 0, 1);
  CHECK(t9z1.orders.size() == 2);
  CHECK(cohomology_of(t9, 0, 2).orders.size() == 1);
  CHECK(cohomology_of(t9, 0, 3).orders.empty());

  for (auto n : {rp2, t7, t9}) {
    auto h0 = cohomology_of(n, 0, 0);
    CHECK(static_cast<int>(h0.orders.size()) == n->num_components());
  }
}

TEST_CASE("sphere boundary complexes") {
  for (int n = 1; n <= 3; ++n) {
    auto s = nerves::sphere(n);
    for (int m : {0, 2, 4}) {
      for (int deg = 0; deg <= n; ++deg) {
        auto g = cohomology_of(s, m, deg);
        size_t expected = (deg == 0 || deg == n) ? 1 : 0;
        CHECK(g.orders.size() == expected);
        if (expected) CHECK(g.orders[0] == m);
      }
    }
  }
}

TEST_CASE("coboundary tester distinguishes non-cocycles") {
  auto rp2 = nerves::rp2();
  auto c = AbelianCochain::zero(rp2, 1, 2);
  c.values[0] = 1;
  CHECK(coboundary_test(c) == CoboundaryVerdict::NotCocycle);
  auto v = AbelianCochain::zero(rp2, 0, 2);
  v.values[2] = 1;
  CHECK(coboundary_test(coboundary(v)) == CoboundaryVerdict::Coboundary);
  auto pre = coboundary_preimage(coboundary(v));
  REQUIRE(pre);
  CHECK(coboundary(*pre) == coboundary(v));
  auto g = cohomology_of(rp2, 2, 1);
  AbelianCochain w = AbelianCochain::zero(rp2, 1, 2);
  for (size_t i = 0; i < w.values.size(); ++i) w.values[i] = g.generators[0][i].get_si();
  CHECK(coboundary_test(w) == CoboundaryVerdict::Nontrivial);
}

TEST_CASE("cup products and bockstein on RP2") {
  auto rp2 = nerves::rp2();
  auto g = cohomology_of(rp2, 2, 1);
  AbelianCochain w = AbelianCochain::zero(rp2, 1, 2);
  for (size_t i = 0; i < w.values.size(); ++i) w.values[i] = g.generators[0][i].get_si();
  CHECK(is_cocycle(cup_product(w, w)));
  CHECK(coboundary_test(cup_product(w, w)) == CoboundaryVerdict::Nontrivial);
  CHECK(coboundary_test(cup_product(w, AbelianCochain::zero(rp2, 1, 2))) == CoboundaryVerdict::Coboundary);
  auto b = bockstein(w);
  CHECK(b.degree == 2);
  CHECK(coboundary_test(b) == CoboundaryVerdict::Nontrivial);
  auto b2 = bockstein(cup_product(w, w));
  CHECK(b2.degree == 3);
  for (long x : b2.values) CHECK(x == 0);
}

TEST_CASE("cup product descends to cohomology") {
  auto t7 = nerves::torus7();
  auto g = cohomology_of(t7, 2, 1);
  Rng rng(5);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    AbelianCochain a = AbelianCochain::zero(t7, 1, 2), b = a;
    for (size_t k = 0; k < g.generators.size(); ++k) {
      int ca = bit(rng), cb = bit(rng);
      for (size_t i = 0; i < a.values.size(); ++i) {
        a.values[i] += ca * g.generators[k][i].get_si();
        b.values[i] += cb * g.generators[k][i].get_si();
      }
    }
    a.normalize();
    b.normalize();
    AbelianCochain lam = AbelianCochain::zero(t7, 0, 2);
    for (auto& x : lam.values) x = bit(rng);
    auto a2 = a + coboundary(lam);
    CHECK(same_class(cup_product(a, b), cup_product(a2, b)));
  }
}
