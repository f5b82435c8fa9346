#pragma once

#include <optional>
#include <string>
#include <vector>

#include "super2vec/bimodule.hpp"

namespace super2vec {

// Algebras above this dimension are rejected by the idempotent machinery.
constexpr int kMoritaDimCap = 64;

// A basis of an eAe corner as an algebra in its own right. embedding maps
// corner coordinates to coordinates in the ambient algebra.
template <class T>
struct Corner {
  AlgebraPtr<T> algebra;
  Mat<T> embedding;
  Vec<T> idempotent;
};

template <class T>
Corner<T> corner(const AlgebraPtr<T>& a, const Vec<T>& e);

// An even idempotent e' with 0 != e' != e inside e A_0 e, from the minimal
// polynomial of small candidate elements. None when no candidate splits.
template <class T>
std::optional<Vec<T>> split_idempotent(const AlgebraPtr<T>& a, const Vec<T>& e);

// Orthogonal even idempotents summing to 1 that no candidate splits further.
template <class T>
std::vector<Vec<T>> primitive_idempotents(const AlgebraPtr<T>& a);

// Corner at one primitive even idempotent, Morita equivalent to a when a is simple.
template <class T>
Corner<T> reduce(const AlgebraPtr<T>& a);

// The left ideal A e as an A-k bimodule.
template <class T>
BimodulePtr<T> left_ideal(const AlgebraPtr<T>& a, const Vec<T>& e);

enum class MoritaStatus { Trivial, NotTrivial, NotCentralSimple };

template <class T>
struct MoritaTrivial {
  MoritaStatus status = MoritaStatus::NotTrivial;
  BimodulePtr<T> module;  // S as an A-k bimodule
  Mat<T> action;          // column i is the matrix of basis i of A on S, flattened column-major
};

template <class T>
MoritaTrivial<T> morita_trivial(const AlgebraPtr<T>& a);

struct BWClass {
  int residue = 0;
  int modulus = 8;
};

template <class T>
BWClass bw_class(const AlgebraPtr<T>& a);

// E = End_A(P)^op for a left A-module P (an A-k bimodule), with P as an A-E
// bimodule under p.f = (-1)^{|f||p|} f(p).
template <class T>
struct OppositeEndomorphisms {
  AlgebraPtr<T> algebra;
  BimodulePtr<T> module;
  std::vector<Mat<T>> maps;  // basis of End_A(P), evens first
};

template <class T>
OppositeEndomorphisms<T> opposite_endomorphisms(const BimodulePtr<T>& p);

template <class T>
struct ProjectiveClass {
  BimodulePtr<T> module;
  int multiplicity = 0;  // number of regular summands in this class
  bool flipped = false;  // represented by the parity flip of a regular summand
};

template <class T>
struct ProjectiveDecomposition {
  Mat<T> radical;  // basis of the Jacobson radical, as columns
  std::vector<Vec<T>> idempotents;
  std::vector<int> class_of;  // class index of each idempotent
  std::vector<ProjectiveClass<T>> classes;
  // Dimension of the even intertwiner space between classes i and j.
  std::vector<std::vector<int>> hom_dims;
};

template <class T>
Mat<T> jacobson_radical(const AlgebraPtr<T>& a);

template <class T>
ProjectiveDecomposition<T> decompose_projectives(const AlgebraPtr<T>& a, Rng& rng);

// P is the sum of one projective per class, as an A-E bimodule with
// E = End_A(P)^op; the certificate's inverse is the E-A bimodule.
template <class T>
struct PicardSurjectification {
  AlgebraPtr<T> algebra;
  BimodulePtr<T> module;
  InvertibilityCertificate<T> certificate;
  ProjectiveDecomposition<T> decomposition;
};

template <class T>
PicardSurjectification<T> picard_surjectify(const AlgebraPtr<T>& a, Rng& rng);

// M free of rank one as a left module on an even generator: phi with
// m0 . b = phi(b) m0, and the isomorphism A_phi -> M, a -> a m0.
template <class T>
struct PicardWitness {
  AlgebraHom<T> phi;
  Intertwiner<T> iso;
};

template <class T>
struct PicardSearch {
  SearchStatus status = SearchStatus::NotFound;
  std::optional<PicardWitness<T>> witness;
};

template <class T>
PicardSearch<T> picard_witness(const BimodulePtr<T>& m, Rng& rng);

}  // namespace super2vec
