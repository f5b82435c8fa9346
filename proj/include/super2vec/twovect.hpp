#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "super2vec/crossed.hpp"
#include "super2vec/morita.hpp"

namespace super2vec {

using Report = CocycleReport;

// Per-vertex algebras, per-edge (a<b) invertible A_b-A_a bimodules M_ab, and
// per-triangle even intertwiners mu_abc: M_bc (x)_{A_b} M_ab -> M_ac.
template <class T>
struct TwoVectorBundle {
  NervePtr nerve;
  std::vector<AlgebraPtr<T>> algebras;
  std::vector<BimodulePtr<T>> modules;
  std::vector<RelTensor<T>> composites;
  std::vector<Mat<T>> mu;
  std::string name;

  const BimodulePtr<T>& module_at(int a, int b) const { return modules.at(nerve->index_of({a, b})); }
};

template <class T>
using BundlePtr = std::shared_ptr<const TwoVectorBundle<T>>;

// mu column for the quotient basis element represented by first_i (x) second_j.
template <class T>
using PairValue = std::function<Vec<T>(int triangle, int i, int j)>;

template <class T>
TwoVectorBundle<T> assemble_bundle(NervePtr nerve, std::vector<AlgebraPtr<T>> algebras,
                                   std::vector<BimodulePtr<T>> modules, const PairValue<T>& mu);
// Explicit mu matrices; only shapes are checked here.
template <class T>
TwoVectorBundle<T> assemble_bundle(NervePtr nerve, std::vector<AlgebraPtr<T>> algebras,
                                   std::vector<BimodulePtr<T>> modules, std::vector<Mat<T>> mu);

template <class T>
Report validate_bundle(const TwoVectorBundle<T>& v, bool check_certificates = true);

// Constant bundle with fibre A, modules A and mu the multiplication.
template <class T>
TwoVectorBundle<T> constant_bundle(const NervePtr& nerve, const AlgebraPtr<T>& a);
// Gerbe: lines of parity eps, mu(l_bc (x) l_ab) = s_abc l_ac. Valid when eps
// and s are cocycles.
template <class T>
TwoVectorBundle<T> gerbe(const NervePtr& nerve, const AlgebraPtr<T>& k, const AbelianCochain& eps,
                         const UnitCochain<T>& s);
// Modules A_g, mu(x (x) y) = x g_bc(y) a_abc^{-1}.
template <class T>
TwoVectorBundle<T> reconstruct(const CMCocycle<T>& c);

template <class T>
struct Extraction {
  CMCocycle<T> cocycle;
  std::vector<BimodulePtr<T>> conjugated;  // P_b (x) M_ab (x) P_a^{-1}, or M_ab
  std::vector<PicardWitness<T>> witnesses;  // per edge, A_g -> conjugated module
};

// Requires hh1(A) = 0 and, per vertex, an invertible A-A_a bimodule P_a
// (empty: every vertex algebra is A itself). Throws std::runtime_error when
// an edge has no Picard witness.
template <class T>
Extraction<T> extract_cocycle(const TwoVectorBundle<T>& v, const AlgebraPtr<T>& a, Rng& rng,
                              const std::vector<BimodulePtr<T>>& equivalences = {}, bool check_hh1 = true);

template <class T>
TwoVectorBundle<T> tensor(const TwoVectorBundle<T>& v, const TwoVectorBundle<T>& w);
template <class T>
TwoVectorBundle<T> direct_sum(const TwoVectorBundle<T>& v, const TwoVectorBundle<T>& w);
// Degenerate images use the identity bimodule and the unit constraints.
template <class T>
TwoVectorBundle<T> refine(const TwoVectorBundle<T>& v, const SimplicialMap& rho);

// P_a is an A2_a-A1_a bimodule; phi_ab: M2_ab (x) P_a -> P_b (x) M1_ab.
template <class T>
struct BundleMorphism {
  BundlePtr<T> source;
  BundlePtr<T> target;
  std::vector<BimodulePtr<T>> p;
  std::vector<RelTensor<T>> before;  // M2_ab (x) P_a
  std::vector<RelTensor<T>> after;   // P_b (x) M1_ab
  std::vector<Mat<T>> phi;
};

template <class T>
BundleMorphism<T> assemble_morphism(BundlePtr<T> source, BundlePtr<T> target,
                                    std::vector<BimodulePtr<T>> p, const PairValue<T>& phi);
template <class T>
Report validate_morphism(const BundleMorphism<T>& m);
template <class T>
BundleMorphism<T> identity_morphism(const BundlePtr<T>& v);
// Morphism v -> reconstruct(x.cocycle) built from the Picard witnesses; needs
// every vertex algebra of v to be the extraction algebra.
template <class T>
BundleMorphism<T> extraction_morphism(const BundlePtr<T>& v, const BundlePtr<T>& rebuilt, const Extraction<T>& x);

// Gerbe-twisted module bundle: left A-modules E_a (A-k bimodules) and even
// maps eps_ab: E_a -> E_b (x) L_ab with eps_ab(x v) = g_ab(x) eps_ab(v).
template <class T>
struct TwistedModuleBundle {
  BundlePtr<T> gerbe;
  AlgebraPtr<T> algebra;
  std::vector<AlgebraHom<T>> twist;  // per edge; empty means identity
  std::vector<BimodulePtr<T>> modules;
  std::vector<RelTensor<T>> targets;  // E_b (x) L_ab
  std::vector<Mat<T>> eps;
};

struct TwistedReport {
  Report report;
  bool fibres_invertible = false;
};

template <class T>
TwistedModuleBundle<T> assemble_twisted(const BundlePtr<T>& gerbe, const AlgebraPtr<T>& a,
                                        std::vector<AlgebraHom<T>> twist, std::vector<BimodulePtr<T>> modules,
                                        const std::function<Mat<T>(int edge, const RelTensor<T>&)>& eps);
template <class T>
TwistedReport validate_twisted_module(const TwistedModuleBundle<T>& t);

// Algebra-bundle cocycle of End(E): g_ab(X) = e X e^{-1} with e the map E_a -> E_b
// read off eps_ab, and a = 1.
template <class T>
CMCocycle<T> end_descent(const TwistedModuleBundle<T>& t);

template <class T>
struct ClassTriple {
  std::vector<BWClass> bw;  // per component
  AbelianCochain epsilon;
  UnitCochain<T> x;
};

// Throws std::invalid_argument when a fibre is not central simple.
template <class T>
ClassTriple<T> invariant_triple(const TwoVectorBundle<T>& v, Rng& rng);
template <class T>
ClassTriple<T> triple_product(const ClassTriple<T>& a, const ClassTriple<T>& b);
template <class T>
ClassTriple<T> triple_inverse(const ClassTriple<T>& a);
template <class T>
ClassTriple<T> unit_triple(const NervePtr& nerve);
template <class T>
bool same_class(const ClassTriple<T>& a, const ClassTriple<T>& b);
template <class T>
std::string describe(const ClassTriple<T>& t);

// Smallest m <= max_order with x^m a coboundary.
template <class T>
std::optional<int> torsion_order(const UnitCochain<T>& x, int max_order = 24);

}  // namespace super2vec
