#pragma once

#include <optional>
#include <string>
#include <vector>

#include "super2vec/twovect.hpp"

namespace super2vec {

// Z -> G^ -> G with G^ a finite group of invertible matrices, Z the m-th roots
// of unity (as scalar matrices) and G an abstract finite group given by its table.
template <class T>
struct ExtensionData {
  std::vector<Mat<T>> elements;           // G^
  std::vector<int> parity;                // label per element of G^
  std::vector<int> projection;            // G^ -> G
  std::vector<std::vector<int>> g_table;  // g_table[x][y] = x y
  std::vector<int> grading;               // G -> Z/2
  int z_order = 2;
  std::vector<std::string> names;         // optional, per element of G^
};

template <class T>
struct CentralExtension {
  ExtensionData<T> data;
  std::vector<std::vector<int>> hat_table;
  std::vector<int> hat_inverse;
  std::vector<int> g_inverse;
  int hat_identity = 0;
  int g_identity = 0;
  std::vector<int> center;  // center[k] is the element zeta^k, zeta = root_of_unity(m, 1)

  int size() const { return static_cast<int>(data.elements.size()); }
  int group_size() const { return static_cast<int>(data.g_table.size()); }
  // First element of G^ over g.
  int lift(int g) const;
  // Phase k with x = zeta^k, for x in Z.
  std::optional<int> central_phase(int x) const;
};

template <class T>
std::vector<std::string> check_extension(const ExtensionData<T>& d);
// Throws std::invalid_argument listing every failed check.
template <class T>
CentralExtension<T> make_extension(ExtensionData<T> d);

// {+-1} -> Pin-_1 = {+-1, +-e} in Cl(0,1) -> O_1, acting on Cl(0,1) by left multiplication.
template <class T>
CentralExtension<T> pin_minus_1();
// Z/m x G with G^ acting through the regular permutation representation of G.
template <class T>
CentralExtension<T> split_extension(const std::vector<std::vector<int>>& g_table, const std::vector<int>& grading,
                                    int z_order);

// A with a G-action, an A-k bimodule F and an action of G^ on F; the element
// g^ acts with parity equal to its label.
template <class T>
struct Implementation {
  AlgebraPtr<T> algebra;
  std::vector<AlgebraHom<T>> action;  // per element of G
  BimodulePtr<T> module;
  std::vector<Mat<T>> hat_action;     // per element of G^
};

struct ImplementationReport {
  CocycleReport report;
  bool morita = false;  // F carries an invertibility certificate
};

// Checks g^ (a v) = (-1)^{|g^||a|} g(a) (g^ v), multiplicativity of both
// actions and that Z acts by its scalars.
template <class T>
ImplementationReport validate_implementation(const CentralExtension<T>& ext, const Implementation<T>& impl);

// G^ -> A^x given by homogeneous units: G acts by graded conjugation through
// any lift and G^ acts on F through A.
template <class T>
Implementation<T> inner_implementation(const CentralExtension<T>& ext, const AlgebraPtr<T>& a,
                                       const std::vector<Vec<T>>& images, const BimodulePtr<T>& f);

// Cl(0,1) (x) Cl(1,0) with O_1 acting by the parity operator on the first
// factor and Pin-_1 embedded as {+-1, +-e (x) 1}; F is the simple module.
template <class T>
Implementation<T> pin_implementation(const CentralExtension<T>& ext);

// Per edge (a<b), an element of G; cocycle condition g_bc g_ab = g_ac.
using GCocycle = std::vector<int>;

template <class T>
std::vector<std::string> check_g_cocycle(const CentralExtension<T>& ext, const NervePtr& nerve, const GCocycle& g);
// Edges with w(e) = 1 carry the reflection of O_1.
GCocycle tautological_o1(const AbelianCochain& w);

template <class T>
struct LiftingGerbe {
  BundlePtr<T> bundle;
  std::vector<int> lifts;    // per edge, an element of G^
  AbelianCochain epsilon;    // grading of g
  UnitCochain<T> z;          // z_abc = g^_ac^{-1} g^_bc g^_ab, values in Z
  AbelianCochain z_phase;    // z as a Z/m cochain
};

// Lifts default to ext.lift(g_ab). The gerbe has lines of parity eps and
// mu-scalars (-1)^{eps u eps} z^{-1}.
template <class T>
LiftingGerbe<T> lifting_gerbe(const CentralExtension<T>& ext, const NervePtr& nerve, const GCocycle& g,
                              std::vector<int> lifts = {});
template <class T>
std::vector<int> random_lifts(const CentralExtension<T>& ext, const GCocycle& g, Rng& rng);

// zeta with lifts2 = lifts1 zeta, so that z2 = z1 * coboundary(zeta); the
// identity is checked and std::logic_error thrown if it fails.
template <class T>
UnitCochain<T> lift_change(const CentralExtension<T>& ext, const LiftingGerbe<T>& a, const LiftingGerbe<T>& b);

// Exhaustive search (with pruning) for lifts forming a G^-cocycle; nerves with
// more than max_edges edges are rejected.
template <class T>
std::optional<std::vector<int>> find_cocycle_lift(const CentralExtension<T>& ext, const NervePtr& nerve,
                                                  const GCocycle& g, int max_edges = 15);

template <class T>
struct AlgebraBundle {
  BundlePtr<T> bundle;
  CMCocycle<T> cocycle;
};

// reconstruct of the cocycle (action(g_ab), a = 1).
template <class T>
AlgebraBundle<T> associated_algebra_bundle(const NervePtr& nerve, const GCocycle& g,
                                           const std::vector<AlgebraHom<T>>& action);

template <class T>
struct CanonicalMorphism {
  LiftingGerbe<T> gerbe;
  AlgebraBundle<T> algebra;
  TwistedModuleBundle<T> twisted;  // E_a = F, eps_ab(v) = (-1)^{|g^||v|} g^ v (x) l_ab
  BundleMorphism<T> morphism;      // gerbe -> algebra bundle, P_a = F
  CocycleReport report;            // twisted module and hexagon failures
  bool isomorphism = false;
  std::string verdict;
};

template <class T>
CanonicalMorphism<T> canonical_morphism(const CentralExtension<T>& ext, const Implementation<T>& impl,
                                        const NervePtr& nerve, const GCocycle& g, std::vector<int> lifts = {});

}  // namespace super2vec
