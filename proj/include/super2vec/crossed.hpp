#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "super2vec/bimodule.hpp"
#include "super2vec/cochain.hpp"

namespace super2vec {

// Cochain with values in the units of the base field, written multiplicatively.
template <class T>
struct UnitCochain {
  NervePtr nerve;
  int degree = 0;
  std::vector<T> values;

  static UnitCochain one(NervePtr nerve, int degree);

  const T& at(const Simplex& s) const { return values.at(nerve->index_of(s)); }
  T& at(const Simplex& s) { return values.at(nerve->index_of(s)); }
  UnitCochain operator*(const UnitCochain& o) const;
  UnitCochain inverse() const;
  bool operator==(const UnitCochain& o) const { return degree == o.degree && values == o.values; }
};

template <class T>
UnitCochain<T> coboundary(const UnitCochain<T>& c);
template <class T>
bool is_cocycle(const UnitCochain<T>& c);
// lambda with c = d(lambda), via the Smith form of the integer coboundary and
// exact roots in the base field.
template <class T>
std::optional<UnitCochain<T>> coboundary_preimage(const UnitCochain<T>& c);
template <class T>
bool same_class(const UnitCochain<T>& a, const UnitCochain<T>& b);
// exp(2 pi i c/m) valuewise.
template <class T>
UnitCochain<T> roots_of_unity(const AbelianCochain& c);
// Exponents k with values exp(2 pi i k/m), when every value is an m-th root of unity.
template <class T>
std::optional<AbelianCochain> phases(const UnitCochain<T>& c, int m);
template <class T>
std::optional<T> nth_root(const T& x, long n);

// x = roots_of_unity(phases) * d(nu).
template <class T>
struct FiniteRepresentative {
  AbelianCochain phases;
  UnitCochain<T> nu;
};

// A mu_m-valued cocycle cohomologous to x, when the class of x comes from
// H^n(mu_m). Throws std::invalid_argument when k has no primitive m-th root.
template <class T>
std::optional<FiniteRepresentative<T>> finite_representative(const UnitCochain<T>& x, int m);

// Cocycle with values in AUT(A): g per edge, a per triangle.
template <class T>
struct CMCocycle {
  NervePtr nerve;
  AlgebraPtr<T> algebra;
  std::vector<AlgebraHom<T>> g;
  std::vector<UnitElement<T>> a;

  const AlgebraHom<T>& g_at(int u, int v) const { return g.at(nerve->index_of({u, v})); }
  const UnitElement<T>& a_at(int u, int v, int w) const { return a.at(nerve->index_of({u, v, w})); }
};

struct CocycleReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

template <class T>
CocycleReport validate_cocycle(const CMCocycle<T>& c);
template <class T>
CMCocycle<T> trivial_cocycle(const NervePtr& nerve, const AlgebraPtr<T>& a);
// g = eta^eps on edges, a = 1; valid when eps is a Z/2 cocycle.
template <class T>
CMCocycle<T> parity_cocycle(const AbelianCochain& eps, const AlgebraPtr<T>& a);
// Multiplies every a-value by a scalar 2-cocycle.
template <class T>
CMCocycle<T> scalar_twist(const CMCocycle<T>& c, const UnitCochain<T>& z);

template <class T>
struct CoboundaryData {
  std::vector<AlgebraHom<T>> h;    // per vertex
  std::vector<UnitElement<T>> e;   // per edge
};

template <class T>
CoboundaryData<T> trivial_coboundary(const CMCocycle<T>& c);
// The cocycle c' related to c by (h, e).
template <class T>
CMCocycle<T> apply_coboundary(const CMCocycle<T>& c, const CoboundaryData<T>& d);
template <class T>
CocycleReport coboundary_report(const CMCocycle<T>& c, const CMCocycle<T>& c2, const CoboundaryData<T>& d);
template <class T>
bool verify_coboundary(const CMCocycle<T>& c, const CMCocycle<T>& c2, const CoboundaryData<T>& d) {
  return coboundary_report(c, c2, d).ok();
}

// Edgewise phi (x) phi', trianglewise a (x) a'. The target algebra defaults to
// a fresh graded tensor.
template <class T>
CMCocycle<T> tensor_cocycles(const CMCocycle<T>& c, const CMCocycle<T>& c2, AlgebraPtr<T> target = nullptr);

// phi = eta^eps o i(u) with u a unit of parity eps.
template <class T>
struct CSALift {
  int eps = 0;
  UnitElement<T> u;
};

template <class T>
std::optional<CSALift<T>> csa_lift(const AlgebraHom<T>& phi, Rng& rng);

template <class T>
struct ScalarCocycle {
  AbelianCochain epsilon;  // degree 1, Z/2
  UnitCochain<T> x;        // degree 2
};

template <class T>
CocycleReport validate_scalar_cocycle(const ScalarCocycle<T>& s);
// Classes agree: epsilon in H^1(Z/2) and x in H^2 with unit coefficients.
template <class T>
bool same_class(const ScalarCocycle<T>& a, const ScalarCocycle<T>& b);
// (eps + eps', (-1)^{eps cup eps'} x x')
template <class T>
ScalarCocycle<T> twisted_product(const ScalarCocycle<T>& a, const ScalarCocycle<T>& b);

template <class T>
struct CSAInvariants {
  ScalarCocycle<T> cocycle;
  std::vector<CSALift<T>> lifts;  // per edge; f(x) = x u^{-1}
};

// Throws std::runtime_error when an edge has no lift (outside the CSA hypothesis).
template <class T>
CSAInvariants<T> csa_invariants(const CMCocycle<T>& c, Rng& rng);

// A coboundary from c to c2 when their CSA invariants agree.
template <class T>
std::optional<CoboundaryData<T>> find_coboundary(const CMCocycle<T>& c, const CMCocycle<T>& c2, Rng& rng);

template <class T>
std::vector<std::string> check_crossed_module(const AlgebraPtr<T>& a, Rng& rng, int samples);

// Butterfly H1 -> K <- H2 over G1 <- K -> G2 with computable lifts along p1
// and preimages along i2.
template <class H1, class G1, class H2, class G2, class K>
struct Butterfly {
  std::function<K(const K&, const K&)> mul;
  std::function<K(const K&)> inv;
  std::function<bool(const K&, const K&)> equal;
  std::function<K(const H1&)> i1;
  std::function<K(const H2&)> i2;
  std::function<G1(const K&)> p1;
  std::function<G2(const K&)> p2;
  std::function<std::optional<K>(const G1&)> lift;
  std::function<std::optional<H2>(const K&)> preimage;
};

template <class H2, class G2, class K>
struct Transport {
  std::vector<K> lifts;
  std::vector<G2> f;
  std::vector<H2> b;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

// f = p2(lift g), i2(b) = l_ac l_ab^{-1} l_bc^{-1} i1(a)^{-1}. Supplied lifts
// replace the lift procedure.
template <class H1, class G1, class H2, class G2, class K>
Transport<H2, G2, K> butterfly_transport(const Butterfly<H1, G1, H2, G2, K>& bf, const NervePtr& nerve,
                                         const std::vector<G1>& g, const std::vector<H1>& a,
                                         const std::vector<K>* lifts = nullptr) {
  Transport<H2, G2, K> out;
  const auto& edges = nerve->simplices(1);
  for (size_t k = 0; k < edges.size(); ++k) {
    if (lifts) {
      out.lifts.push_back(lifts->at(k));
      continue;
    }
    auto l = bf.lift(g[k]);
    if (!l) {
      out.errors.push_back("no lift on edge (" + std::to_string(edges[k][0]) + "," + std::to_string(edges[k][1]) +
                           ")");
      return out;
    }
    out.lifts.push_back(*l);
  }
  for (const auto& l : out.lifts) out.f.push_back(bf.p2(l));
  const auto& tris = nerve->simplices(2);
  for (size_t t = 0; t < tris.size(); ++t) {
    const auto& s = tris[t];
    const K& ab = out.lifts[nerve->index_of({s[0], s[1]})];
    const K& bc = out.lifts[nerve->index_of({s[1], s[2]})];
    const K& ac = out.lifts[nerve->index_of({s[0], s[2]})];
    K k = bf.mul(bf.mul(bf.mul(ac, bf.inv(ab)), bf.inv(bc)), bf.inv(bf.i1(a[t])));
    auto b = bf.preimage(k);
    if (!b) {
      out.errors.push_back("no preimage on triangle (" + std::to_string(s[0]) + "," + std::to_string(s[1]) + "," +
                           std::to_string(s[2]) + ")");
      return out;
    }
    out.b.push_back(*b);
  }
  return out;
}

// Butterfly between AUT(A) and AUT(B) from an invertible A-B bimodule M:
// K = {(phi, psi, f) : f(phi^{-1}(a) m b) = a f(m) psi(b)}.
template <class T>
struct MoritaElement {
  AlgebraHom<T> phi;
  AlgebraHom<T> psi;
  Mat<T> f;
};

template <class T>
using MoritaButterfly = Butterfly<UnitElement<T>, AlgebraHom<T>, UnitElement<T>, AlgebraHom<T>, MoritaElement<T>>;

template <class T>
MoritaButterfly<T> morita_butterfly(const BimodulePtr<T>& m, std::shared_ptr<Rng> rng);

// Butterfly between AUT(A) and Z/2 x Bk^x for a central simple A:
// K = {(phi, eps, u) : phi = eta^eps o i(u)}, with f(x) = x u^{-1}.
template <class T>
struct CSAElement {
  AlgebraHom<T> phi;
  int eps = 0;
  UnitElement<T> u;
};

template <class T>
using CSAButterfly = Butterfly<UnitElement<T>, AlgebraHom<T>, T, int, CSAElement<T>>;

template <class T>
CSAButterfly<T> csa_butterfly(const AlgebraPtr<T>& a, std::shared_ptr<Rng> rng);

// Checks the butterfly axioms on sample elements; ks must be nonempty.
template <class H1, class G1, class H2, class G2, class K>
std::vector<std::string> check_butterfly(const Butterfly<H1, G1, H2, G2, K>& bf, const std::vector<H1>& h1,
                                         const std::vector<H2>& h2, const std::vector<K>& ks,
                                         const std::function<bool(const G1&, const G1&)>& eq1,
                                         const std::function<bool(const G2&, const G2&)>& eq2,
                                         const std::function<G1(const H1&)>& t1,
                                         const std::function<G2(const H2&)>& t2,
                                         const std::function<H1(const G1&, const H1&)>& act1,
                                         const std::function<H2(const G2&, const H2&)>& act2) {
  std::vector<std::string> out;
  const K id = bf.mul(ks.front(), bf.inv(ks.front()));
  for (const auto& h : h1) {
    if (!eq1(bf.p1(bf.i1(h)), t1(h))) out.push_back("p1 o i1 != t1");
    if (!eq2(bf.p2(bf.i1(h)), bf.p2(id))) out.push_back("p2 o i1 != 1");
  }
  for (const auto& h : h2) {
    if (!eq2(bf.p2(bf.i2(h)), t2(h))) out.push_back("p2 o i2 != t2");
    if (!eq1(bf.p1(bf.i2(h)), bf.p1(id))) out.push_back("p1 o i2 != 1");
    auto back = bf.preimage(bf.i2(h));
    if (!back || !bf.equal(bf.i2(*back), bf.i2(h))) out.push_back("preimage along i2");
  }
  for (const auto& k : ks) {
    for (const auto& h : h1)
      if (!bf.equal(bf.i1(act1(bf.p1(k), h)), bf.mul(bf.mul(k, bf.i1(h)), bf.inv(k))))
        out.push_back("i1 equivariance");
    for (const auto& h : h2)
      if (!bf.equal(bf.i2(act2(bf.p2(k), h)), bf.mul(bf.mul(k, bf.i2(h)), bf.inv(k))))
        out.push_back("i2 equivariance");
    auto l = bf.lift(bf.p1(k));
    if (!l || !eq1(bf.p1(*l), bf.p1(k))) out.push_back("lift along p1");
  }
  return out;
}

// AUT(B)-cocycle from a transport through a Morita butterfly.
template <class T>
CMCocycle<T> transport_cocycle(const MoritaButterfly<T>& bf, const CMCocycle<T>& c, const AlgebraPtr<T>& target,
                               const std::vector<MoritaElement<T>>* lifts = nullptr);
template <class T>
ScalarCocycle<T> transport_scalar(const CSAButterfly<T>& bf, const CMCocycle<T>& c);

}  // namespace super2vec
