#include "doctest.h"

#include "super2vec/algebra.hpp"

using namespace super2vec;
using Q = Rational;
using G = Gaussian;

namespace {

// Independent oracle for Clifford products: multiply generator words by
// repeated adjacent swaps.
int word_sign(std::vector<int> word, int p) {
  int sign = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < word.size(); ++i) {
      if (word[i] > word[i + 1]) {
        std::swap(word[i], word[i + 1]);
        sign = -sign;
        changed = true;
      } else if (word[i] == word[i + 1]) {
        sign *= word[i] < p ? 1 : -1;
        word.erase(word.begin() + i, word.begin() + i + 2);
        changed = true;
        break;
      }
    }
  }
  return sign;
}

template <class T>
int find_label(const AlgebraPtr<T>& a, const std::string& l) {
  for (int i = 0; i < a->dim(); ++i)
    if (a->carrier().labels[i] == l) return i;
  return -1;
}

}  // namespace

TEST_CASE("make_algebra accepts and rejects") {
  auto k = ground_field<Q>();
  CHECK(check_algebra(*k).empty());
  auto de = dual_numbers<Q>(1);
  CHECK(check_algebra(*de).empty());
  CHECK(de->carrier().even == 1);
  CHECK(de->carrier().odd == 1);
  SuperAlgebra<Q>::Table t(2, std::vector<SparseRow<Q>>(2));
  t[0][0] = {{0, Q(1)}};
  t[0][1] = {{1, Q(1)}};
  t[1][0] = {{1, Q(1)}};
  t[1][1] = {{1, Q(1)}};  // odd * odd landing in odd
  CHECK_THROWS_WITH(make_algebra<Q>(SuperVectorSpace(1, 1), t, unit_vector<Q>(2, 0)),
                    doctest::Contains("parity violation"));
}

TEST_CASE("Clifford tables match the word oracle") {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{0, 1}, {1, 0}, {0, 3}, {2, 1}, {1, 2}}) {
    auto a = clifford<Q>(p, q);
    CHECK(check_algebra(*a).empty());
    const int n = p + q;
    for (int i = 0; i < a->dim(); ++i)
      for (int j = 0; j < a->dim(); ++j) {
        std::vector<int> word;
        for (const std::string* l : {&a->carrier().labels[i], &a->carrier().labels[j]})
          for (size_t c = 0; c < l->size(); ++c)
            if ((*l)[c] == 'e') word.push_back(std::stoi(l->substr(c + 1, 1)) - 1);
        int expected = word_sign(word, p);
        REQUIRE(a->product(i, j).size() == 1);
        CHECK(a->product(i, j)[0].second == Q(expected));
      }
    CHECK(a->dim() == (1 << n));
  }
}

TEST_CASE("graded tensor of Cl(0,1) with itself is Cl(0,2)") {
  auto c1 = clifford<Q>(0, 1);
  auto t = graded_tensor(c1, c1);
  CHECK(check_algebra(*t).empty());
  int a = find_label(t, "e1*1"), b = find_label(t, "1*e1");
  REQUIRE(a >= 0);
  REQUIRE(b >= 0);
  Vec<Q> x = t->basis(a), y = t->basis(b);
  CHECK(t->multiply(x, y) == Vec<Q>(-t->multiply(y, x)));
  CHECK(t->multiply(x, x) == Vec<Q>(-t->unit()));
  CHECK(t->multiply(y, y) == Vec<Q>(-t->unit()));
}

TEST_CASE("graded opposite") {
  auto c1 = clifford<Q>(0, 1);
  auto op = graded_opposite(c1);
  CHECK(op->same_table(*clifford<Q>(1, 0)));
  for (auto [p, q] : std::vector<std::pair<int, int>>{{0, 2}, {1, 2}, {0, 3}}) {
    auto a = clifford<Q>(p, q);
    CHECK(graded_opposite(graded_opposite(a))->same_table(*a));
  }
  auto m2 = endomorphism_algebra<Q>(2, 0);
  auto m2op = graded_opposite(m2);
  // E01 *op E10 = E10 E01 = E11
  int e01 = find_label(m2, "E0_1"), e10 = find_label(m2, "E1_0"), e11 = find_label(m2, "E1_1");
  CHECK(m2op->multiply(m2->basis(e01), m2->basis(e10)) == m2->basis(e11));
  auto sp = split_pair<Q>();
  CHECK(graded_opposite(sp)->same_table(*sp));
}

TEST_CASE("graded tensor is associative on tables") {
  auto a = clifford<Q>(0, 1), b = clifford<Q>(1, 0), c = dual_numbers<Q>(1);
  auto l = graded_tensor(graded_tensor(a, b), c);
  auto r = graded_tensor(a, graded_tensor(b, c));
  // Relabel: basis labels "x*y*z" agree under both bracketings.
  REQUIRE(l->dim() == r->dim());
  std::vector<int> perm(l->dim());
  for (int i = 0; i < l->dim(); ++i) perm[i] = find_label(r, l->carrier().labels[i]);
  CHECK(permute_basis(r, perm)->same_table(*l));
}

TEST_CASE("centers") {
  auto m2 = endomorphism_algebra<Q>(2, 0);
  CHECK(even_center(m2).cols() == 1);
  CHECK(even_center(dual_numbers<Q>(1)).cols() == 1);
  CHECK(full_center(dual_numbers<Q>(0)).cols() == 2);
  CHECK(even_center(split_pair<Q>()).cols() == 2);
}

TEST_CASE("central simplicity") {
  CHECK(is_central_simple(clifford<Q>(0, 2)).central_simple);
  auto de = is_central_simple(dual_numbers<Q>(1));
  CHECK_FALSE(de.central_simple);
  CHECK_FALSE(is_zero_vec<Q>(de.witness));
  CHECK_FALSE(is_central_simple(split_pair<Q>()).central_simple);
  CHECK(is_central_simple(clifford<Q>(0, 1)).central_simple);
  CHECK(is_central_simple(clifford<G>(0, 1)).central_simple);
  for (int n = 0; n <= 3; ++n)
    for (int p = 0; p <= n; ++p)
      for (int m = 0; m + n <= 3; ++m)
        for (int r = 0; r <= m; ++r) {
          auto a = clifford<Q>(p, n - p), b = clifford<Q>(r, m - r);
          REQUIRE(is_central_simple(a).central_simple);
          REQUIRE(is_central_simple(b).central_simple);
          CHECK(is_central_simple(graded_tensor(a, b)).central_simple);
        }
}

TEST_CASE("HH1") {
  for (int n = 0; n <= 3; ++n)
    for (int p = 0; p <= n; ++p) CHECK(hh1(clifford<Q>(p, n - p)).dimension == 0);
  auto de = dual_numbers<Q>(1);
  auto h = hh1(de);
  CHECK(h.dimension == 1);
  REQUIRE(h.representatives.size() == 1);
  Mat<Q> d = h.representatives[0];
  // D(1) = 0 and D(eps) = eps up to the normalization of the representative.
  CHECK(is_zero_vec<Q>(Vec<Q>(d.col(0))));
  CHECK(d(1, 1) == Q(1));
  CHECK(hh1(ground_field<Q>()).dimension == 0);
  // Tensor products of HH1-trivial Clifford algebras.
  CHECK(hh1(graded_tensor(clifford<Q>(0, 1), clifford<Q>(1, 1))).dimension == 0);
}

TEST_CASE("inner witnesses") {
  Rng rng(3);
  auto m2 = endomorphism_algebra<Q>(2, 0);
  Vec<Q> dg = Vec<Q>::Zero(4);
  dg(find_label(m2, "E0_0")) = Q(1);
  dg(find_label(m2, "E1_1")) = Q(-1);
  auto u = UnitElement<Q>::from(m2, dg);
  REQUIRE(u);
  auto phi = conjugation(*u);
  CHECK(phi.check().empty());
  auto w = inner_witness(phi, rng);
  REQUIRE(w.status == SearchStatus::Found);
  for (int j = 0; j < 4; ++j)
    CHECK(m2->multiply(phi(m2->basis(j)), w.unit->value) == m2->multiply(w.unit->value, m2->basis(j)));

  auto c1 = clifford<Q>(0, 1);
  auto eta = parity_operator(c1);
  CHECK(inner_witness(eta, rng).status != SearchStatus::Found);

  auto c2 = clifford<Q>(0, 2);
  Vec<Q> v = c2->unit() + c2->basis(find_label(c2, "e1e2"));
  auto u2 = UnitElement<Q>::from(c2, v);
  REQUIRE(u2);
  auto w2 = inner_witness(conjugation(*u2), rng);
  REQUIRE(w2.status == SearchStatus::Found);
  // Scalar multiple of u2.
  Vec<Q> ratio = w2.unit->value;
  CHECK(ratio * v(0) == v * ratio(0));
}
