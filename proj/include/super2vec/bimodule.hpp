#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "super2vec/algebra.hpp"

namespace super2vec {

// A-B bimodule: left[i] is the action of basis element i of A, right[j] the
// action m -> m . b_j of basis element j of B, both as matrices on the carrier.
template <class T>
struct SuperBimodule {
  AlgebraPtr<T> left_algebra;
  AlgebraPtr<T> right_algebra;
  SuperVectorSpace carrier;
  std::vector<Mat<T>> left;
  std::vector<Mat<T>> right;
  std::string name;

  int dim() const { return carrier.dim(); }
  Mat<T> act_left(const Vec<T>& a) const;
  Mat<T> act_right(const Vec<T>& b) const;
};

template <class T>
using BimodulePtr = std::shared_ptr<const SuperBimodule<T>>;

template <class T>
std::vector<std::string> check_bimodule(const SuperBimodule<T>& m);
// Validates and wraps; throws std::invalid_argument listing the first failure.
template <class T>
BimodulePtr<T> make_bimodule(SuperBimodule<T> m);

// A as an A-A bimodule.
template <class T>
BimodulePtr<T> regular_bimodule(const AlgebraPtr<T>& a);
// B_phi: B with left multiplication and right action through phi: A -> B.
template <class T>
BimodulePtr<T> twisted_regular(const AlgebraHom<T>& phi);
// The ground field on k^{0|1} or k^{1|0} as a k-k bimodule.
template <class T>
BimodulePtr<T> line(const AlgebraPtr<T>& k, int parity);

template <class T>
BimodulePtr<T> direct_sum(const BimodulePtr<T>& m, const BimodulePtr<T>& n);

template <class T>
BimodulePtr<T> parity_flip(const BimodulePtr<T>& m);
// Odd identity map from the carrier of parity_flip(m) to the carrier of m.
template <class T>
Mat<T> flip_map(const SuperVectorSpace& s);

// A'-B' bimodule with actions precomposed with phi: A' -> A and psi: B' -> B.
template <class T>
BimodulePtr<T> twist(const BimodulePtr<T>& m, const AlgebraHom<T>& phi, const AlgebraHom<T>& psi);

template <class T>
struct RelTensor {
  BimodulePtr<T> module;
  BimodulePtr<T> first;
  BimodulePtr<T> second;
  PairLayout layout;
  // Quotient coordinates of every pair basis element; the section sends
  // quotient basis q to the pair basis element free[q].
  Mat<T> projection;
  std::vector<Index> free;

  // Class of x (x) y.
  Vec<T> pure(const Vec<T>& x, const Vec<T>& y) const;
  Vec<T> pure_basis(int i, int j) const { return projection.col(layout.at(i, j)); }
  // (i, j) such that quotient basis q is the class of first_i (x) second_j.
  std::pair<int, int> representative(int q) const { return layout.pairs[free[q]]; }
};

// M (x)_B N for M an A-B bimodule and N a B-C bimodule.
template <class T>
RelTensor<T> rel_tensor(const BimodulePtr<T>& m, const BimodulePtr<T>& n);

// (A (x) A')-(B (x) B') bimodule on M (x) M' with Koszul signs. Algebras
// default to fresh graded tensors.
template <class T>
BimodulePtr<T> external_tensor(const BimodulePtr<T>& m, const BimodulePtr<T>& m2,
                               AlgebraPtr<T> left = nullptr, AlgebraPtr<T> right = nullptr);

template <class T>
struct Intertwiner {
  BimodulePtr<T> source;
  BimodulePtr<T> target;
  Mat<T> map;

  Vec<T> operator()(const Vec<T>& v) const { return map * v; }
};

template <class T>
std::vector<std::string> check_intertwiner(const Intertwiner<T>& f);
template <class T>
Intertwiner<T> identity_intertwiner(const BimodulePtr<T>& m);
template <class T>
Intertwiner<T> compose(const Intertwiner<T>& f, const Intertwiner<T>& g);  // f o g
template <class T>
std::optional<Intertwiner<T>> invert(const Intertwiner<T>& f);
// f (x) g between relative tensor products.
template <class T>
Intertwiner<T> tensor_intertwiners(const Intertwiner<T>& f, const Intertwiner<T>& g, const RelTensor<T>& src,
                                   const RelTensor<T>& tgt);

// Matrix of x (x) y -> (-1)^{|g||x|} f(x) (x) g(y) between pair layouts;
// f and g need not be even.
template <class T>
Mat<T> pair_map(const PairLayout& src, const PairLayout& tgt, const SuperVectorSpace& left_src, const Mat<T>& f,
                const Mat<T>& g, int g_parity);

// Basis of the even intertwiners M -> N, as matrices.
template <class T>
std::vector<Mat<T>> intertwiner_space(const BimodulePtr<T>& m, const BimodulePtr<T>& n);

// Basis of the maps X of the given parity with X s_k = t_k X for all k.
template <class T>
std::vector<Mat<T>> equivariant_maps(const std::vector<Mat<T>>& s, const std::vector<Mat<T>>& t,
                                     const SuperVectorSpace& src, const SuperVectorSpace& tgt, int parity);

template <class T>
struct MatrixSearch {
  SearchStatus status = SearchStatus::NotFound;
  std::optional<Mat<T>> matrix;
};

// Invertible linear combination of square matrices; same sampling scheme as find_unit.
template <class T>
MatrixSearch<T> find_invertible(const std::vector<Mat<T>>& basis, Rng& rng);

template <class T>
struct IsoSearch {
  SearchStatus status = SearchStatus::NotFound;
  std::optional<Intertwiner<T>> iso;
};

template <class T>
IsoSearch<T> find_isomorphism(const BimodulePtr<T>& m, const BimodulePtr<T>& n, Rng& rng);

// For M an A-B bimodule: inverse N = Hom_{k-B}(M, B), a B-A bimodule, with
// evaluation N (x)_A M -> B and coevaluation A -> M (x)_B N.
template <class T>
struct InvertibilityCertificate {
  BimodulePtr<T> inverse;
  RelTensor<T> inner;  // N (x)_A M
  RelTensor<T> outer;  // M (x)_B N
  Intertwiner<T> evaluation;
  Intertwiner<T> evaluation_inverse;
  Intertwiner<T> coevaluation;
  Intertwiner<T> coevaluation_inverse;
};

template <class T>
std::optional<InvertibilityCertificate<T>> certify_invertible(const BimodulePtr<T>& m);
template <class T>
std::vector<std::string> check_certificate(const InvertibilityCertificate<T>& c);

}  // namespace super2vec
