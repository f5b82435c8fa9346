#include <bitset>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "super2vec/lifting.hpp"

using namespace super2vec;
using namespace testing_support;
using Q = Rational;
using G = Gaussian;

namespace {

struct Failure {
  std::string what;
};

#define EXPECT(cond, msg)                                                     \
  do {                                                                        \
    if (!(cond)) {                                                            \
      std::ostringstream os_;                                                 \
      os_ << __LINE__ << ": " << msg;                                         \
      throw Failure{os_.str()};                                               \
    }                                                                         \
  } while (0)

AbelianCochain w1(const NervePtr& n) {
  auto g = cohomology_of(n, 2, 1);
  AbelianCochain w = AbelianCochain::zero(n, 1, 2);
  for (size_t i = 0; i < w.values.size(); ++i) w.values[i] = g.generators[0][i].get_si();
  return w;
}

template <class T>
BundlePtr<T> share(TwoVectorBundle<T> v) {
  return std::make_shared<const TwoVectorBundle<T>>(std::move(v));
}

AbelianCochain random_epsilon(const NervePtr& n, Rng& rng) {
  std::uniform_int_distribution<int> bit(0, 1);
  auto f = AbelianCochain::zero(n, 0, 2);
  for (auto& v : f.values) v = bit(rng);
  auto eps = coboundary(f);
  for (const auto& g : cohomology_of(n, 2, 1).generators)
    if (bit(rng))
      for (size_t i = 0; i < eps.values.size(); ++i) eps.values[i] = (eps.values[i] + g[i].get_si()) % 2;
  return eps;
}

template <class T>
CMCocycle<T> random_cocycle(const NervePtr& n, const AlgebraPtr<T>& a, Rng& rng) {
  auto c = parity_cocycle(random_epsilon(n, rng), a);
  CoboundaryData<T> d;
  for (int v = 0; v < n->count(0); ++v) d.h.push_back(random_automorphism(a, rng));
  for (int e = 0; e < n->count(1); ++e) d.e.push_back(random_even_unit(a, rng));
  c = apply_coboundary(c, d);
  if (n->count(3) == 0) {
    auto z = UnitCochain<T>::one(n, 2);
    std::uniform_int_distribution<int> pick(0, 5);
    for (auto& v : z.values) {
      const int k = pick(rng);
      v = k == 0 ? T(-1) : k == 1 ? T(2) : T(1);
    }
    c = scalar_twist(c, z);
  }
  return c;
}

// (id, e) with e the image of 1 under each Picard witness.
template <class T>
CoboundaryData<T> witness_coboundary(const CMCocycle<T>& c, const Extraction<T>& x) {
  CoboundaryData<T> d;
  for (int v = 0; v < c.nerve->count(0); ++v) d.h.push_back(identity_hom(c.algebra));
  for (const auto& w : x.witnesses) d.e.push_back(*UnitElement<T>::from(c.algebra, w.iso.map * c.algebra->unit()));
  return d;
}

AbelianCochain normalized(AbelianCochain c) {
  c.normalize();
  return c;
}

// Constructs lambda with d(lambda) = a - b (resp. a / b) and checks it.
template <class T>
bool verified_same(const ScalarCocycle<T>& a, const ScalarCocycle<T>& b) {
  const AbelianCochain de = normalized(a.epsilon - b.epsilon);
  auto le = coboundary_preimage(de);
  if (!le || !(normalized(coboundary(*le)) == de)) return false;
  const UnitCochain<T> ratio = a.x * b.x.inverse();
  auto lx = coboundary_preimage(ratio);
  return lx && coboundary(*lx) == ratio;
}

template <class T>
bool verified_same(const ClassTriple<T>& a, const ClassTriple<T>& b) {
  if (a.bw.size() != b.bw.size()) return false;
  for (size_t i = 0; i < a.bw.size(); ++i)
    if (a.bw[i].residue != b.bw[i].residue || a.bw[i].modulus != b.bw[i].modulus) return false;
  return verified_same(ScalarCocycle<T>{a.epsilon, a.x}, ScalarCocycle<T>{b.epsilon, b.x});
}

template <class T>
ClassTriple<T> expected_triple(const CMCocycle<T>& c, Rng& rng) {
  auto inv = csa_invariants(c, rng);
  ClassTriple<T> t;
  t.bw.assign(c.nerve->num_components(), bw_class(c.algebra));
  t.epsilon = inv.cocycle.epsilon;
  t.x = inv.cocycle.x;
  return t;
}

// ---------------------------------------------------------------------------

void brauer_wall_table() {
  for (int n = 0; n <= 4; ++n) {
    auto b = bw_class(clifford<Q>(0, n));
    EXPECT(b.residue == n && b.modulus == 8, "Cl(0," << n << ") has class " << b.residue << " mod " << b.modulus);
  }
  for (int n = 0; n <= 3; ++n) {
    auto b = bw_class(clifford<G>(0, n));
    EXPECT(b.residue == n % 2 && b.modulus == 2, "complex Cl_" << n << " has class " << b.residue);
  }
}

void brauer_wall_additivity() {
  std::vector<std::pair<int, int>> sigs;
  for (int n = 0; n <= 5; ++n)
    for (int p = 0; p <= n; ++p) sigs.push_back({p, n - p});
  std::vector<int> cls;
  for (auto [p, q] : sigs) cls.push_back(bw_class(clifford<Q>(p, q)).residue);
  int pairs = 0;
  for (size_t i = 0; i < sigs.size(); ++i)
    for (size_t j = 0; j < sigs.size(); ++j) {
      auto [p, q] = sigs[i];
      auto [r, s] = sigs[j];
      if (p + q + r + s > 5) continue;
      ++pairs;
      const int got = bw_class(graded_tensor(clifford<Q>(p, q), clifford<Q>(r, s))).residue;
      EXPECT(got == (cls[i] + cls[j]) % 8,
             "Cl(" << p << "," << q << ") x Cl(" << r << "," << s << ") gives " << got);
    }
  EXPECT(pairs == 126, pairs << " pairs");
}

void hochschild() {
  for (int n = 0; n <= 3; ++n)
    for (int p = 0; p <= n; ++p)
      EXPECT(hh1(clifford<Q>(p, n - p)).dimension == 0, "HH1(Cl(" << p << "," << n - p << ")) nonzero");
  auto de = dual_numbers<Q>(1);
  auto h = hh1(de);
  EXPECT(h.dimension == 1 && h.representatives.size() == 1, "HH1(k[eps]) has dimension " << h.dimension);
  const Mat<Q>& d = h.representatives[0];
  // Independent check of D(1) = 0, D(eps) = eps and the Leibniz rule on the basis.
  EXPECT(d.rows() == 2 && d.cols() == 2, "representative has shape " << d.rows() << "x" << d.cols());
  EXPECT(d(0, 0) == Q(0) && d(1, 0) == Q(0) && d(0, 1) == Q(0) && d(1, 1) == Q(1), "D(eps) != eps");
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Vec<Q> x = de->basis(i), y = de->basis(j);
      Vec<Q> lhs = d * de->multiply(x, y);
      Vec<Q> rhs = de->multiply(Vec<Q>(d * x), y) + de->multiply(x, Vec<Q>(d * y));
      EXPECT(lhs == rhs, "Leibniz fails on (" << i << "," << j << ")");
    }
}

void picard() {
  Rng rng(404);
  auto cc = ground_field<G>();
  EXPECT(picard_witness(parity_flip(regular_bimodule(cc)), rng).status != SearchStatus::Found,
         "Pi C has a Picard witness");
  auto ccl1 = clifford<G>(0, 1);
  auto w = picard_witness(parity_flip(regular_bimodule(ccl1)), rng);
  EXPECT(w.status == SearchStatus::Found, "Pi CCl1 has no Picard witness");
  EXPECT(check_intertwiner(w.witness->iso).empty(), "CCl1 witness is not an intertwiner");

  auto ps = picard_surjectify(cc, rng);
  EXPECT(ps.algebra->dim() == 4, "surjectified algebra has dimension " << ps.algebra->dim());
  EXPECT(check_certificate(ps.certificate).empty(), "certificate fails");
  const auto& pm = *ps.module;
  EXPECT((same_algebra(pm.left_algebra, ps.algebra) && same_algebra(pm.right_algebra, cc)) ||
             (same_algebra(pm.left_algebra, cc) && same_algebra(pm.right_algebra, ps.algebra)),
         "certificate does not relate the new algebra to C");
  auto e = ps.algebra;
  std::vector<BimodulePtr<G>> generators = {regular_bimodule(e), parity_flip(regular_bimodule(e))};
  int sampled = 0;
  for (int trial = 0; trial < 12; ++trial) {
    auto m = random_bimodule(e, rng, false);
    if (trial % 3 == 2) m = rel_tensor(m, generators[trial % 2]).module;
    if (trial % 4 == 3) m = rel_tensor(random_bimodule(e, rng, false), m).module;
    EXPECT(certify_invertible(m).has_value(), "sample " << trial << " is not invertible");
    ++sampled;
    auto r = picard_witness(m, rng);
    EXPECT(r.status == SearchStatus::Found, "sample " << trial << " does not resolve");
    EXPECT(check_intertwiner(r.witness->iso).empty(), "sample " << trial << " witness is not an intertwiner");
  }
  for (const auto& m : generators) EXPECT(picard_witness(m, rng).status == SearchStatus::Found, "generator");
  EXPECT(sampled == 12, "sampled " << sampled);
}

void cocycle_round_trip() {
  Rng rng(5050);
  auto rp2 = nerves::rp2();
  auto a = clifford<Q>(0, 1);
  EXPECT(rp2->num_vertices() == 6, "RP2 nerve has " << rp2->num_vertices() << " vertices");
  for (int trial = 0; trial < 50; ++trial) {
    auto c = random_cocycle(rp2, a, rng);
    EXPECT(validate_cocycle(c).ok(), "input " << trial << " invalid");
    auto v = reconstruct(c);
    EXPECT(validate_bundle(v).ok(), "reconstruction " << trial << " invalid");
    auto x = extract_cocycle(v, a, rng);
    EXPECT(validate_cocycle(x.cocycle).ok(), "extraction " << trial << " invalid");
    auto report = coboundary_report(c, x.cocycle, witness_coboundary(c, x));
    EXPECT(report.ok(), "trial " << trial << ": " << report.failures.front());
  }
}

// Cocycle space of torus7 over Z/2 spanned by vertex coboundaries and H^1.
std::vector<AbelianCochain> torus7_z2_cocycles(const NervePtr& t7) {
  std::vector<AbelianCochain> basis;
  for (int v = 0; v + 1 < t7->count(0); ++v) {
    auto f = AbelianCochain::zero(t7, 0, 2);
    f.values[v] = 1;
    basis.push_back(normalized(coboundary(f)));
  }
  for (const auto& g : cohomology_of(t7, 2, 1).generators) {
    auto c = AbelianCochain::zero(t7, 1, 2);
    for (size_t i = 0; i < c.values.size(); ++i) c.values[i] = g[i].get_si();
    basis.push_back(c);
  }
  std::vector<AbelianCochain> out;
  for (int mask = 0; mask < (1 << basis.size()); ++mask) {
    auto c = AbelianCochain::zero(t7, 1, 2);
    for (size_t i = 0; i < basis.size(); ++i)
      if (mask >> i & 1) c = c + basis[i];
    out.push_back(normalized(c));
  }
  return out;
}

void classification_group_law() {
  Rng rng(6060);
  const std::vector<AlgebraPtr<Q>> fibres = {clifford<Q>(0, 1), clifford<Q>(1, 0), clifford<Q>(1, 1),
                                             clifford<Q>(0, 2), ground_field<Q>()};
  std::uniform_int_distribution<int> pick(0, static_cast<int>(fibres.size()) - 1);
  for (auto n : {nerves::rp2(), nerves::torus7()}) {
    std::vector<ClassTriple<Q>> seen;
    for (int trial = 0; trial < 25; ++trial) {
      auto v = reconstruct(random_cocycle(n, fibres[pick(rng)], rng));
      auto w = reconstruct(random_cocycle(n, fibres[pick(rng)], rng));
      auto tv = invariant_triple(v, rng), tw = invariant_triple(w, rng);
      auto lhs = invariant_triple(tensor(v, w), rng);
      EXPECT(verified_same(lhs, triple_product(tv, tw)),
             n->name() << " pair " << trial << ": " << describe(lhs) << " vs " << describe(triple_product(tv, tw)));
      EXPECT(verified_same(triple_product(tv, tw), triple_product(tw, tv)), n->name() << " commutativity " << trial);
      seen.push_back(tv);
      seen.push_back(tw);
    }
    for (size_t i = 0; i + 2 < seen.size(); ++i) {
      const auto &a = seen[i], &b = seen[i + 1], &c = seen[i + 2];
      EXPECT(verified_same(triple_product(triple_product(a, b), c), triple_product(a, triple_product(b, c))),
             n->name() << " associativity " << i);
    }
  }

  // Cup symmetry over every pair of Z/2 1-cocycles on torus7, with an explicit
  // preimage from a GF(2) reduction of the coboundary map that tracks edges.
  auto t7 = nerves::torus7();
  const int ne = t7->count(1), nt = t7->count(2);
  EXPECT(ne <= 32 && nt <= 32, "torus7 too large for bitsets");
  std::vector<std::bitset<32>> rows, combos;
  std::vector<int> pivots;
  for (int e = 0; e < ne; ++e) {
    auto unit = AbelianCochain::zero(t7, 1, 2);
    unit.values[e] = 1;
    auto d = normalized(coboundary(unit));
    std::bitset<32> r, combo;
    for (int t = 0; t < nt; ++t) r[t] = d.values[t] != 0;
    combo[e] = true;
    for (size_t i = 0; i < rows.size(); ++i)
      if (r[pivots[i]]) r ^= rows[i], combo ^= combos[i];
    if (r.none()) continue;
    int p = 0;
    while (!r[p]) ++p;
    rows.push_back(r);
    combos.push_back(combo);
    pivots.push_back(p);
  }
  auto cocycles = torus7_z2_cocycles(t7);
  EXPECT(cocycles.size() == 256, cocycles.size() << " cocycles");
  for (const auto& c : cocycles) EXPECT(is_cocycle(c), "basis combination is not a cocycle");
  int distinct = 0;
  for (size_t i = 0; i < cocycles.size(); ++i) {
    for (size_t j = 0; j < i; ++j) distinct += cocycles[i] == cocycles[j];
  }
  EXPECT(distinct == 0, distinct << " repeated cocycles");
  for (const auto& a : cocycles)
    for (const auto& b : cocycles) {
      auto s = normalized(cup_product(a, b) + cup_product(b, a));
      std::bitset<32> v, lam;
      for (int t = 0; t < nt; ++t) v[t] = s.values[t] != 0;
      for (size_t i = 0; i < rows.size(); ++i)
        if (v[pivots[i]]) v ^= rows[i], lam ^= combos[i];
      EXPECT(v.none(), "cup product is not symmetric up to coboundary");
      auto l = AbelianCochain::zero(t7, 1, 2);
      for (int e = 0; e < ne; ++e) l.values[e] = lam[e];
      EXPECT(normalized(coboundary(l)) == s, "constructed preimage fails");
    }
}

void butterfly_consistency() {
  auto rng = std::make_shared<Rng>(7070);
  auto rp2 = nerves::rp2();
  const std::vector<AlgebraPtr<Q>> algebras = {clifford<Q>(0, 1), clifford<Q>(1, 0), clifford<Q>(1, 1),
                                               clifford<Q>(0, 2)};
  for (int trial = 0; trial < 20; ++trial) {
    const auto& a = algebras[trial % algebras.size()];
    auto c = random_cocycle(rp2, a, *rng);
    EXPECT(validate_cocycle(c).ok(), "input " << trial << " invalid");
    auto s = transport_scalar(csa_butterfly(a, rng), c);
    EXPECT(validate_scalar_cocycle(s).ok(), "transport " << trial << " invalid");
    auto inv = csa_invariants(c, *rng);
    EXPECT(verified_same(s, inv.cocycle), "trial " << trial << " disagrees");
  }
}

ClassTriple<Q> pin_triple(const NervePtr& n) {
  auto w = w1(n);
  ClassTriple<Q> t;
  t.bw = {BWClass{0, 8}};
  t.epsilon = w;
  t.x = roots_of_unity<Q>(cup_product(w, w));
  return t;
}

void lifting_flagship() {
  Rng rng(8080);
  auto rp2 = nerves::rp2();
  auto pin = pin_minus_1<Q>();
  auto impl = pin_implementation(pin);
  auto w = w1(rp2);
  auto g = tautological_o1(w);
  auto lg = lifting_gerbe(pin, rp2, g);
  EXPECT(validate_bundle(*lg.bundle).ok(), "lifting gerbe invalid");
  EXPECT(same_class(lg.z_phase, cup_product(w, w)), "obstruction is not w1^2");
  EXPECT(coboundary_test(lg.z_phase) == CoboundaryVerdict::Nontrivial, "obstruction vanishes");
  EXPECT(!find_cocycle_lift(pin, rp2, g), "a cocycle lift exists on RP2");

  auto cm = canonical_morphism(pin, impl, rp2, g);
  EXPECT(cm.report.ok(), cm.report.failures.front());
  EXPECT(cm.verdict == "isomorphism", "verdict " << cm.verdict);
  auto expected = pin_triple(rp2);
  auto tg = invariant_triple(*cm.gerbe.bundle, rng);
  auto ta = invariant_triple(*cm.algebra.bundle, rng);
  EXPECT(verified_same(tg, expected), "gerbe triple " << describe(tg));
  EXPECT(verified_same(ta, expected), "algebra bundle triple " << describe(ta));
  EXPECT(coboundary_test(tg.epsilon) == CoboundaryVerdict::Nontrivial, "epsilon trivial");
  EXPECT(!coboundary_preimage(tg.x), "x trivial");

  auto circle = nerves::circle();
  auto gc = tautological_o1(w1(circle));
  auto lc = lifting_gerbe(pin, circle, gc);
  EXPECT(coboundary_test(lc.z_phase) == CoboundaryVerdict::Coboundary, "circle obstruction nonzero");
  auto lift = find_cocycle_lift(pin, circle, gc);
  EXPECT(lift.has_value(), "no lift on the circle");
  for (int e = 0; e < circle->count(1); ++e)
    EXPECT(pin.data.projection[(*lift)[e]] == gc[e], "lift does not cover g on edge " << e);
  auto lifted = lifting_gerbe(pin, circle, gc, *lift);
  EXPECT(lifted.z == UnitCochain<Q>::one(circle, 2), "lift is not a cocycle");
}

// Algebra bundle with g_ab = h_b eta^eps_ab h_a^{-1} and a = 1.
template <class T>
CMCocycle<T> algebra_bundle_cocycle(const NervePtr& n, const AlgebraPtr<T>& a, Rng& rng) {
  std::vector<AlgebraHom<T>> h;
  for (int v = 0; v < n->count(0); ++v) h.push_back(random_automorphism(a, rng));
  auto eps = random_epsilon(n, rng);
  CMCocycle<T> c{n, a, {}, {}};
  for (int e = 0; e < n->count(1); ++e) {
    const auto& s = n->simplices(1)[e];
    auto mid = eps.values[e] ? parity_operator(a) : identity_hom(a);
    c.g.push_back(compose(h[s[1]], compose(mid, inverse_hom(h[s[0]]))));
  }
  for (int t = 0; t < n->count(2); ++t) c.a.push_back(*UnitElement<T>::from(a, a->unit()));
  return c;
}

template <class T>
void algebra_bundles_are_torsion(const std::vector<AlgebraPtr<T>>& algebras, int m, Rng& rng) {
  for (auto n : {nerves::rp2(), nerves::torus9()})
    for (const auto& a : algebras) {
      auto c = algebra_bundle_cocycle(n, a, rng);
      EXPECT(validate_cocycle(c).ok(), "algebra bundle cocycle invalid on " << n->name());
      auto v = reconstruct(c);
      auto t = invariant_triple(v, rng);
      auto rep = finite_representative(t.x, m);
      EXPECT(rep.has_value(), "x on " << n->name() << " has no mu_" << m << " representative: " << describe(t));
      EXPECT(roots_of_unity<T>(rep->phases) * coboundary(rep->nu) == t.x, "representative not verified");
      EXPECT(is_cocycle(rep->phases), "mu_" << m << " representative is not a cocycle");
      auto order = torsion_order(t.x);
      EXPECT(order && m % *order == 0, "x class on " << n->name() << " not torsion");
    }
}

void torsion() {
  Rng rng(9090);
  algebra_bundles_are_torsion<Q>({clifford<Q>(0, 1), clifford<Q>(1, 1), clifford<Q>(0, 2)}, 2, rng);
  algebra_bundles_are_torsion<G>({clifford<G>(0, 1), clifford<G>(1, 1)}, 4, rng);
  {
    auto rp2 = nerves::rp2();
    auto pin = pin_minus_1<Q>();
    auto impl = pin_implementation(pin);
    auto ab = associated_algebra_bundle<Q>(rp2, tautological_o1(w1(rp2)), impl.action);
    auto t = invariant_triple(*ab.bundle, rng);
    auto rep = finite_representative(t.x, 2);
    EXPECT(rep && roots_of_unity<Q>(rep->phases) * coboundary(rep->nu) == t.x, "Pin algebra bundle x " << describe(t));
    EXPECT(torsion_order(t.x) == 2 && same_class(rep->phases, cup_product(w1(rp2), w1(rp2))),
           "Pin algebra bundle class is not w1^2");
  }

  // A mu_4 gerbe on the nine-vertex torus carrying a generator of H^2(Z/4).
  auto t9 = nerves::torus9();
  auto h2 = cohomology_of(t9, 4, 2);
  EXPECT(!h2.generators.empty(), "H^2(torus; Z/4) is zero");
  auto c = AbelianCochain::zero(t9, 2, 4);
  for (size_t i = 0; i < c.values.size(); ++i) c.values[i] = h2.generators[0][i].get_si();
  c.normalize();
  EXPECT(is_cocycle(c) && coboundary_test(c) == CoboundaryVerdict::Nontrivial, "Z/4 class is zero");
  auto k = ground_field<G>();
  auto gb = gerbe(t9, k, AbelianCochain::zero(t9, 1, 2), roots_of_unity<G>(c));
  EXPECT(validate_bundle(gb).ok(), "mu_4 gerbe invalid");
  auto t = invariant_triple(gb, rng);
  EXPECT(coboundary_preimage(t.x) == std::nullopt, "gerbe class reported zero");
  auto order = torsion_order(t.x);
  EXPECT(order == 4, "gerbe class has torsion order " << (order ? std::to_string(*order) : "none"));
  auto rep = finite_representative(t.x, 4);
  EXPECT(rep && roots_of_unity<G>(rep->phases) * coboundary(rep->nu) == t.x, "gerbe x has no mu_4 representative");
  const auto ph = &rep->phases;
  EXPECT(same_class(*ph, c.scaled(-1)) || same_class(*ph, c), "gerbe x is not the input class");
  // 0 -> Z -> Z -> Z/4 -> 0: the torus has H^3(Z) = 0, so the image is a coboundary.
  auto b = bockstein(*ph);
  EXPECT(b.degree == 3 && b.modulus == 0 && is_cocycle(b), "Bockstein is not an integral 3-cocycle");
  auto pre = coboundary_preimage(b);
  EXPECT(pre && coboundary(*pre) == b, "Bockstein image not a verified coboundary");
  EXPECT(cohomology_of(t9, 0, 3).orders.empty(), "H^3(torus; Z) nonzero");

  // Non-torsion control: 2 raised to an integral generator.
  auto z2 = cohomology_of(t9, 0, 2);
  auto x2 = UnitCochain<Q>::one(t9, 2);
  for (size_t i = 0; i < x2.values.size(); ++i) {
    const long e = z2.generators[0][i].get_si();
    for (long k = 0; k < (e < 0 ? -e : e); ++k) x2.values[i] *= e < 0 ? Q(1) / Q(2) : Q(2);
  }
  EXPECT(is_cocycle(x2), "control is not a cocycle");
  EXPECT(!torsion_order(x2), "2^generator reported torsion");
  EXPECT(!finite_representative(x2, 2), "2^generator has a mu_2 representative");
}

// ---------------------------------------------------------------------------

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

void sign_identities(Rng& rng) {
  auto algs = small_algebras<Q>();
  std::uniform_int_distribution<size_t> pick(0, algs.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    auto b = algs[pick(rng)];
    auto m = random_bimodule(b, rng), n = random_bimodule(b, rng);
    auto base = rel_tensor(m, n);
    auto flipped = parity_flip(base.module);
    Mat<Q> to_flip = flip_map<Q>(base.module->carrier).transpose();

    // M (x) Pi N -> Pi(M (x) N) without a sign.
    Mat<Q> qn = flip_map<Q>(n->carrier);
    auto src_a = rel_tensor(m, parity_flip(n));
    std::function<Vec<Q>(int, int)> img_a = [&](int i, int j) {
      return Vec<Q>(to_flip * base.pure(unit_vector<Q>(m->dim(), i), qn.col(j)));
    };
    Mat<Q> fa = basis_matrix<Q>(src_a, img_a);
    Intertwiner<Q> ia{src_a.module, flipped, fa};
    EXPECT(well_defined<Q>(src_a, fa, img_a) && check_intertwiner(ia).empty() && invert(ia),
           "M (x) Pi N trial " << trial);

    // Pi M (x) N -> Pi(M (x) N) with (-1)^{|y|}.
    Mat<Q> qm = flip_map<Q>(m->carrier);
    auto src_b = rel_tensor(parity_flip(m), n);
    std::function<Vec<Q>(int, int)> img_b = [&](int i, int j) {
      Vec<Q> v = to_flip * base.pure(qm.col(i), unit_vector<Q>(n->dim(), j));
      return n->carrier.parity(j) ? Vec<Q>(-v) : v;
    };
    Mat<Q> fb = basis_matrix<Q>(src_b, img_b);
    Intertwiner<Q> ib{src_b.module, flipped, fb};
    EXPECT(well_defined<Q>(src_b, fb, img_b) && check_intertwiner(ib).empty() && invert(ib),
           "Pi M (x) N trial " << trial);
  }
}

void compositor_coherence(Rng& rng) {
  auto algs = small_algebras<Q>();
  std::uniform_int_distribution<size_t> pick(1, algs.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = algs[pick(rng)];
    auto f1 = random_automorphism(a, rng), f2 = random_automorphism(a, rng), f3 = random_automorphism(a, rng);
    auto b1 = twisted_regular(f1), b2 = twisted_regular(f2), b3 = twisted_regular(f3);
    auto f32 = compose(f3, f2), f21 = compose(f2, f1), f321 = compose(f32, f1);
    auto b32 = twisted_regular(f32), b21 = twisted_regular(f21), b321 = twisted_regular(f321);
    auto t32 = rel_tensor(b3, b2), t21 = rel_tensor(b2, b1);
    auto c32 = compositor(f3, f2, t32, b32), c21 = compositor(f2, f1, t21, b21);
    auto t32_1 = rel_tensor(b32, b1), t3_21 = rel_tensor(b3, b21);
    auto c32_1 = compositor(f32, f1, t32_1, b321), c3_21 = compositor(f3, f21, t3_21, b321);
    for (const auto* c : {&c32, &c21, &c32_1, &c3_21})
      EXPECT(check_intertwiner(*c).empty() && invert(*c), "compositor not invertible, trial " << trial);
    const int d = a->dim();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          Vec<Q> left = c32_1(t32_1.pure(c32(t32.pure_basis(i, j)), a->basis(k)));
          Vec<Q> right = c3_21(t3_21.pure(a->basis(i), c21(t21.pure_basis(j, k))));
          EXPECT(left == right, "square fails at trial " << trial);
        }
  }
}

void opposite_involution(Rng& rng) {
  auto algs = small_algebras<Q>();
  algs.push_back(split_pair<Q>());
  algs.push_back(clifford<Q>(1, 2));
  std::uniform_int_distribution<size_t> pick(0, algs.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = algs[pick(rng)];
    if (trial % 2) a = graded_tensor(a, algs[pick(rng) % 6]);
    auto op = graded_opposite(a);
    EXPECT(check_algebra(*op).empty(), "opposite is not an algebra, trial " << trial);
    EXPECT(graded_opposite(op)->same_table(*a), "op op != id, trial " << trial);
    for (int i = 0; i < a->dim(); ++i)
      for (int j = 0; j < a->dim(); ++j) {
        Vec<Q> ba = a->multiply(a->basis(j), a->basis(i));
        if (a->carrier().parity(i) && a->carrier().parity(j)) ba = -ba;
        EXPECT(op->multiply(a->basis(i), a->basis(j)) == ba, "sign rule fails, trial " << trial);
      }
  }
}

void tensor_associativity(Rng& rng) {
  auto algs = small_algebras<Q>();
  std::vector<AlgebraPtr<Q>> small;
  for (const auto& a : algs)
    if (a->dim() <= 4) small.push_back(a);
  std::uniform_int_distribution<size_t> pick(0, small.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    auto b = small[pick(rng)];
    auto m = random_bimodule(b, rng), n = random_bimodule(b, rng), p = random_bimodule(b, rng);
    auto mn = rel_tensor(m, n), np = rel_tensor(n, p);
    auto l = rel_tensor(mn.module, p), r = rel_tensor(m, np.module);
    Mat<Q> f(r.module->dim(), l.module->dim());
    for (Index t = 0; t < l.module->dim(); ++t) {
      auto [u, k] = l.representative(static_cast<int>(t));
      auto [i, j] = mn.representative(u);
      f.col(t) = r.pure(unit_vector<Q>(m->dim(), i), np.pure_basis(j, k));
    }
    for (int i = 0; i < m->dim(); ++i)
      for (int j = 0; j < n->dim(); ++j)
        for (int k = 0; k < p->dim(); ++k)
          EXPECT(Vec<Q>(f * l.pure(mn.pure_basis(i, j), unit_vector<Q>(p->dim(), k))) ==
                     r.pure(unit_vector<Q>(m->dim(), i), np.pure_basis(j, k)),
                 "associator not well defined, trial " << trial);
    Intertwiner<Q> assoc{l.module, r.module, f};
    EXPECT(check_intertwiner(assoc).empty() && invert(assoc), "associator not invertible, trial " << trial);
  }
}

void certificate_composites(Rng& rng) {
  auto algs = small_algebras<Q>();
  std::uniform_int_distribution<size_t> pick(0, algs.size() - 1);
  int certified = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto a = algs[pick(rng)];
    auto m = random_bimodule(a, rng, trial % 4 == 0);
    auto cert = certify_invertible(m);
    EXPECT(cert.has_value() == (m->dim() == a->dim()), "invertibility misjudged, trial " << trial);
    if (!cert) continue;
    ++certified;
    auto f = check_certificate(*cert);
    EXPECT(f.empty(), "trial " << trial << ": " << f.front());
  }
  EXPECT(certified > 50, certified << " certified");
}

void structural_suites() {
  Rng rng(1010);
  sign_identities(rng);
  compositor_coherence(rng);
  opposite_involution(rng);
  tensor_associativity(rng);
  certificate_composites(rng);
}

struct Criterion {
  const char* name;
  void (*run)();
  double budget;  // seconds, 0 for none
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"Brauer-Wall table", brauer_wall_table, 120},
      {"Brauer-Wall additivity", brauer_wall_additivity, 0},
      {"Hochschild HH1", hochschild, 0},
      {"Picard phenomena", picard, 30},
      {"cocycle round trip", cocycle_round_trip, 0},
      {"classification group law", classification_group_law, 0},
      {"butterfly consistency", butterfly_consistency, 0},
      {"lifting flagship", lifting_flagship, 60},
      {"torsion criterion", torsion, 0},
      {"structural property suites", structural_suites, 600},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run();
    } catch (const Failure& f) {
      detail = f.what;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (detail.empty() && c.budget > 0 && secs > c.budget)
      detail = "over the " + std::to_string(static_cast<int>(c.budget)) + " s budget";
    if (!detail.empty()) ++failed;
    std::printf("%s %2zu %-30s %8.2f s%s%s\n", detail.empty() ? "PASS" : "FAIL", i + 1, c.name, secs,
                detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
