#include "doctest.h"

#include <functional>

#include "helpers.hpp"

using namespace super2vec;
using namespace testing_support;
using Q = Rational;
using G = Gaussian;

namespace {

template <class T>
Mat<T> basis_matrix(const RelTensor<T>& src, const std::function<Vec<T>(int, int)>& image) {
  Mat<T> f(0, 0);
  const Index q = src.module->dim();
  for (Index t = 0; t < q; ++t) {
    auto [i, j] = src.representative(static_cast<int>(t));
    Vec<T> v = image(i, j);
    if (f.rows() == 0) f = Mat<T>::Zero(v.size(), q);
    f.col(t) = v;
  }
  return f;
}

// Checks the map is well defined on every pair, not only on representatives.
template <class T>
bool well_defined(const RelTensor<T>& src, const Mat<T>& f, const std::function<Vec<T>(int, int)>& image) {
  for (int i = 0; i < src.first->dim(); ++i)
    for (int j = 0; j < src.second->dim(); ++j)
      if (Vec<T>(f * src.pure_basis(i, j)) != image(i, j)) return false;
  return true;
}

template <class T>
Intertwiner<T> compositor(const AlgebraHom<T>& psi, const AlgebraHom<T>& phi, const RelTensor<T>& src,
                          const BimodulePtr<T>& tgt) {
  const auto& c = psi.target;
  auto image = [&](int i, int j) { return Vec<T>(c->multiply(c->basis(i), psi(phi.target->basis(j)))); };
  return {src.module, tgt, basis_matrix<T>(src, image)};
}

}  // namespace

TEST_CASE("parity flip examples") {
  auto k = ground_field<Q>();
  auto pk = parity_flip(regular_bimodule(k));
  CHECK(pk->carrier.even == 0);
  CHECK(pk->carrier.odd == 1);
  CHECK(check_bimodule(*pk).empty());
  auto c2 = clifford<Q>(0, 2);
  auto m = regular_bimodule(c2);
  auto pp = parity_flip(parity_flip(m));
  CHECK(pp->carrier == m->carrier);
  CHECK(check_intertwiner(identity_intertwiner(m)).empty());
  Intertwiner<Q> same{m, pp, identity<Q>(m->dim())};
  CHECK(check_intertwiner(same).empty());
}

TEST_CASE("relative tensor examples") {
  Rng rng(1);
  auto c1 = clifford<Q>(0, 1);
  auto a = regular_bimodule(c1);
  auto m = twisted_regular(random_automorphism(c1, rng));
  auto am = rel_tensor(a, m);
  CHECK(am.module->carrier == m->carrier);
  CHECK(find_isomorphism(am.module, m, rng).status == SearchStatus::Found);

  auto eta = twisted_regular(parity_operator(c1));
  auto ee = rel_tensor(eta, eta);
  CHECK(check_bimodule(*ee.module).empty());
  CHECK(find_isomorphism(ee.module, a, rng).status == SearchStatus::Found);

  auto k = ground_field<Q>();
  auto t = rel_tensor(line(k, 0), line(k, 1));
  CHECK(t.module->carrier.even == 0);
  CHECK(t.module->carrier.odd == 1);
}

TEST_CASE("intertwiner spaces") {
  auto m2 = endomorphism_algebra<Q>(2, 0);
  CHECK(intertwiner_space(regular_bimodule(m2), regular_bimodule(m2)).size() == 1);
  auto c = ground_field<G>();
  CHECK(intertwiner_space(regular_bimodule(c), parity_flip(regular_bimodule(c))).empty());
  Rng rng(2);
  for (const auto& a : small_algebras<Q>()) {
    auto m = random_bimodule(a, rng);
    auto sp = intertwiner_space(m, m);
    REQUIRE_FALSE(sp.empty());
    Mat<Q> stacked(m->dim() * m->dim(), static_cast<Index>(sp.size()) + 1);
    for (size_t i = 0; i < sp.size(); ++i)
      stacked.col(static_cast<Index>(i)) = Eigen::Map<const Vec<Q>>(sp[i].data(), sp[i].size());
    Mat<Q> id = identity<Q>(m->dim());
    stacked.col(static_cast<Index>(sp.size())) = Eigen::Map<const Vec<Q>>(id.data(), id.size());
    CHECK(rank<Q>(stacked) == static_cast<Index>(sp.size()));
    for (const auto& x : sp) CHECK(check_intertwiner(Intertwiner<Q>{m, m, x}).empty());
  }
}

TEST_CASE("invertibility certificates") {
  Rng rng(3);
  auto c1 = clifford<Q>(0, 1);
  auto reg = regular_bimodule(c1);
  auto cert = certify_invertible(reg);
  REQUIRE(cert);
  CHECK(check_certificate(*cert).empty());
  CHECK(find_isomorphism(cert->inverse, reg, rng).status == SearchStatus::Found);

  auto phi = random_automorphism(c1, rng);
  auto cphi = certify_invertible(twisted_regular(phi));
  REQUIRE(cphi);
  CHECK(check_certificate(*cphi).empty());
  CHECK(find_isomorphism(cphi->inverse, twisted_regular(inverse_hom(phi)), rng).status == SearchStatus::Found);

  auto k = ground_field<Q>();
  CHECK_FALSE(certify_invertible(direct_sum(line(k, 0), line(k, 0))).has_value());
  CHECK_FALSE(certify_invertible(direct_sum(reg, reg)).has_value());
  CHECK(certify_invertible(line(k, 1)).has_value());
}

TEST_CASE("certificate composites on 100 random bimodules") {
  Rng rng(4);
  auto algs = small_algebras<Q>();
  std::uniform_int_distribution<size_t> pick(0, algs.size() - 1);
  int certified = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto a = algs[pick(rng)];
    auto m = random_bimodule(a, rng, trial % 4 == 0);
    auto cert = certify_invertible(m);
    bool is_sum = m->dim() > a->dim();
    CHECK(cert.has_value() == !is_sum);
    if (!cert) continue;
    ++certified;
    REQUIRE(check_certificate(*cert).empty());
  }
  CHECK(certified > 50);
}

TEST_CASE("sign identities for parity flips on 100 random pairs") {
  Rng rng(5);
  auto algs = small_algebras<Q>();
  std::uniform_int_distribution<size_t> pick(0, algs.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    auto b = algs[pick(rng)];
    auto m = random_bimodule(b, rng);
    auto n = random_bimodule(b, rng);
    auto base = rel_tensor(m, n);
    auto flipped = parity_flip(base.module);
    Mat<Q> to_flip = flip_map<Q>(base.module->carrier).transpose();

    // M (x) Pi N -> Pi(M (x) N), identity on symbols.
    auto pn = parity_flip(n);
    Mat<Q> qn = flip_map<Q>(n->carrier);
    auto src_a = rel_tensor(m, pn);
    std::function<Vec<Q>(int, int)> img_a = [&](int i, int j) {
      return Vec<Q>(to_flip * base.pure(unit_vector<Q>(m->dim(), i), qn.col(j)));
    };
    Mat<Q> fa = basis_matrix<Q>(src_a, img_a);
    REQUIRE(well_defined<Q>(src_a, fa, img_a));
    Intertwiner<Q> ia{src_a.module, flipped, fa};
    REQUIRE(check_intertwiner(ia).empty());
    REQUIRE(invert(ia).has_value());

    // Pi M (x) N -> Pi(M (x) N), x (x) y -> (-1)^{|y|} x (x) y.
    auto pm = parity_flip(m);
    Mat<Q> qm = flip_map<Q>(m->carrier);
    auto src_b = rel_tensor(pm, n);
    std::function<Vec<Q>(int, int)> img_b = [&](int i, int j) {
      Vec<Q> v = to_flip * base.pure(qm.col(i), unit_vector<Q>(n->dim(), j));
      return n->carrier.parity(j) ? Vec<Q>(-v) : v;
    };
    Mat<Q> fb = basis_matrix<Q>(src_b, img_b);
    REQUIRE(well_defined<Q>(src_b, fb, img_b));
    Intertwiner<Q> ib{src_b.module, flipped, fb};
    REQUIRE(check_intertwiner(ib).empty());
    REQUIRE(invert(ib).has_value());

    // Without the sign the map is not an intertwiner once odd elements occur.
    if (b->carrier().odd > 0 && n->carrier.odd > 0) {
      std::function<Vec<Q>(int, int)> unsigned_b = [&](int i, int j) {
        return Vec<Q>(to_flip * base.pure(qm.col(i), unit_vector<Q>(n->dim(), j)));
      };
      Mat<Q> fu = basis_matrix<Q>(src_b, unsigned_b);
      CHECK_FALSE((well_defined<Q>(src_b, fu, unsigned_b) &&
                   check_intertwiner(Intertwiner<Q>{src_b.module, flipped, fu}).empty()));
    }
  }
}

TEST_CASE("compositor coherence on 100 random triples") {
  Rng rng(6);
  auto algs = small_algebras<Q>();
  std::uniform_int_distribution<size_t> pick(1, algs.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = algs[pick(rng)];
    auto f1 = random_automorphism(a, rng), f2 = random_automorphism(a, rng), f3 = random_automorphism(a, rng);
    auto b1 = twisted_regular(f1), b2 = twisted_regular(f2), b3 = twisted_regular(f3);
    auto f32 = compose(f3, f2), f21 = compose(f2, f1), f321 = compose(f32, f1);
    auto b32 = twisted_regular(f32), b21 = twisted_regular(f21), b321 = twisted_regular(f321);

    auto t32 = rel_tensor(b3, b2);
    auto c32 = compositor(f3, f2, t32, b32);
    REQUIRE(check_intertwiner(c32).empty());
    REQUIRE(invert(c32).has_value());
    auto t21 = rel_tensor(b2, b1);
    auto c21 = compositor(f2, f1, t21, b21);
    auto t32_1 = rel_tensor(b32, b1);
    auto c32_1 = compositor(f32, f1, t32_1, b321);
    auto t3_21 = rel_tensor(b3, b21);
    auto c3_21 = compositor(f3, f21, t3_21, b321);
    REQUIRE(check_intertwiner(c32_1).empty());
    REQUIRE(check_intertwiner(c3_21).empty());
    const int d = a->dim();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          Vec<Q> left = c32_1(t32_1.pure(c32(t32.pure_basis(i, j)), a->basis(k)));
          Vec<Q> right = c3_21(t3_21.pure(a->basis(i), c21(t21.pure_basis(j, k))));
          REQUIRE(left == right);
        }
  }
}

TEST_CASE("relative tensor associativity on random triples") {
  Rng rng(7);
  auto algs = small_algebras<Q>();
  std::uniform_int_distribution<size_t> pick(0, algs.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    auto b = algs[pick(rng)];
    if (b->dim() > 4) continue;
    auto m = random_bimodule(b, rng), n = random_bimodule(b, rng), p = random_bimodule(b, rng);
    auto mn = rel_tensor(m, n), np = rel_tensor(n, p);
    auto l = rel_tensor(mn.module, p), r = rel_tensor(m, np.module);
    // [[m (x) n] (x) p] -> [m (x) [n (x) p]]
    Mat<Q> f(r.module->dim(), l.module->dim());
    for (Index t = 0; t < l.module->dim(); ++t) {
      auto [u, k] = l.representative(static_cast<int>(t));
      auto [i, j] = mn.representative(u);
      f.col(t) = r.pure(unit_vector<Q>(m->dim(), i), np.pure_basis(j, k));
    }
    for (int i = 0; i < m->dim(); ++i)
      for (int j = 0; j < n->dim(); ++j)
        for (int k = 0; k < p->dim(); ++k)
          REQUIRE(Vec<Q>(f * l.pure(mn.pure_basis(i, j), unit_vector<Q>(p->dim(), k))) ==
                  r.pure(unit_vector<Q>(m->dim(), i), np.pure_basis(j, k)));
    Intertwiner<Q> assoc{l.module, r.module, f};
    CHECK(check_intertwiner(assoc).empty());
    CHECK(invert(assoc).has_value());
  }
}

TEST_CASE("external tensor") {
  Rng rng(8);
  auto a = clifford<Q>(0, 1), b = clifford<Q>(1, 0);
  auto ab = graded_tensor(a, b);
  auto phi = random_automorphism(a, rng), psi = random_automorphism(b, rng);
  auto ext = external_tensor(twisted_regular(phi), twisted_regular(psi), ab, ab);
  CHECK(check_bimodule(*ext).empty());
  auto direct = twisted_regular(tensor_hom(phi, psi, ab, ab));
  CHECK(check_intertwiner(Intertwiner<Q>{ext, direct, identity<Q>(ab->dim())}).empty());

  auto k = ground_field<Q>();
  auto plain = external_tensor(line(k, 1), regular_bimodule(a), a, a);
  CHECK(plain->carrier.odd == 1);
  CHECK(plain->carrier.even == 1);

  for (int trial = 0; trial < 20; ++trial) {
    auto algs = small_algebras<Q>();
    auto x = algs[trial % 5], y = algs[(trial + 1) % 5];
    auto m1 = random_bimodule(x, rng, false), m2 = random_bimodule(y, rng, false);
    auto e = external_tensor(m1, m2);
    REQUIRE(check_bimodule(*e).empty());
    auto cert = certify_invertible(e);
    REQUIRE(cert);
    CHECK(check_certificate(*cert).empty());
  }
}
