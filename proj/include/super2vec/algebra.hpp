#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "super2vec/linalg.hpp"

namespace super2vec {

// Evens-first ordering of index pairs (i, j) of a graded tensor product.
struct PairLayout {
  int left_dim = 0;
  int right_dim = 0;
  SuperVectorSpace space;
  std::vector<std::pair<int, int>> pairs;  // position -> (i, j)
  std::vector<int> position;               // i * right_dim + j -> position

  PairLayout() = default;
  PairLayout(const SuperVectorSpace& a, const SuperVectorSpace& b, const std::string& sep = "*");
  int at(int i, int j) const { return position[static_cast<size_t>(i) * right_dim + j]; }
};

template <class T>
class SuperAlgebra {
 public:
  using Table = std::vector<std::vector<SparseRow<T>>>;

  SuperAlgebra() = default;
  // No validation; see make_algebra.
  SuperAlgebra(SuperVectorSpace carrier, Table table, Vec<T> unit, std::string name = "");

  const std::string& name() const { return name_; }
  const SuperVectorSpace& carrier() const { return carrier_; }
  int dim() const { return carrier_.dim(); }
  int parity(Index i) const { return carrier_.parity(i); }
  const SparseRow<T>& product(int i, int j) const { return table_[i][j]; }
  const Table& table() const { return table_; }
  const Vec<T>& unit() const { return unit_; }

  Vec<T> basis(int i) const { return unit_vector<T>(dim(), i); }
  Vec<T> multiply(const Vec<T>& x, const Vec<T>& y) const;
  Mat<T> left_mult(const Vec<T>& x) const;
  Mat<T> right_mult(const Vec<T>& x) const;
  // Matrix of left multiplication by basis element i.
  Mat<T> left_basis(int i) const;
  Mat<T> right_basis(int i) const;
  int element_parity(const Vec<T>& x) const { return vector_parity<T>(carrier_, x); }
  std::optional<Vec<T>> inverse_of(const Vec<T>& x) const;

  bool same_table(const SuperAlgebra& o) const;
  void set_name(std::string n) { name_ = std::move(n); }

 private:
  SuperVectorSpace carrier_;
  Table table_;
  Vec<T> unit_;
  std::string name_;
};

template <class T>
using AlgebraPtr = std::shared_ptr<const SuperAlgebra<T>>;

template <class T>
bool same_algebra(const AlgebraPtr<T>& a, const AlgebraPtr<T>& b) {
  return a.get() == b.get() || a->same_table(*b);
}

// Full validation: shape, parity additivity, unit, associativity on all basis triples.
template <class T>
AlgebraPtr<T> make_algebra(SuperVectorSpace carrier, typename SuperAlgebra<T>::Table table, Vec<T> unit,
                           std::string name = "");
// Itemized validation failures; empty when valid.
template <class T>
std::vector<std::string> check_algebra(const SuperAlgebra<T>& a);

template <class T>
AlgebraPtr<T> ground_field();
// k[eps] with eps^2 = 0 and eps of the given parity.
template <class T>
AlgebraPtr<T> dual_numbers(int eps_parity);
// k x k, purely even.
template <class T>
AlgebraPtr<T> split_pair();
// End(k^{p|q}) with matrix units as basis.
template <class T>
AlgebraPtr<T> endomorphism_algebra(int even, int odd);
// Cl(p, q): p odd generators squaring to +1, q squaring to -1.
template <class T>
AlgebraPtr<T> clifford(int p, int q);
template <class T>
AlgebraPtr<T> graded_tensor(const AlgebraPtr<T>& a, const AlgebraPtr<T>& b);
template <class T>
AlgebraPtr<T> graded_opposite(const AlgebraPtr<T>& a);
template <class T>
AlgebraPtr<T> direct_product(const AlgebraPtr<T>& a, const AlgebraPtr<T>& b);
// x (x) y inside graded_tensor(a, b), using the same layout.
template <class T>
Vec<T> tensor_element(const PairLayout& layout, const Vec<T>& x, const Vec<T>& y);
// Same algebra with the basis permuted: new basis k is old basis perm[k].
template <class T>
AlgebraPtr<T> permute_basis(const AlgebraPtr<T>& a, const std::vector<int>& perm);

template <class T>
struct AlgebraHom {
  AlgebraPtr<T> source;
  AlgebraPtr<T> target;
  Mat<T> map;

  Vec<T> operator()(const Vec<T>& x) const { return map * x; }
  std::vector<std::string> check() const;
  bool is_automorphism() const;
  bool operator==(const AlgebraHom& o) const { return map == o.map; }
};

template <class T>
AlgebraHom<T> identity_hom(const AlgebraPtr<T>& a);
template <class T>
AlgebraHom<T> compose(const AlgebraHom<T>& f, const AlgebraHom<T>& g);  // f o g
template <class T>
AlgebraHom<T> inverse_hom(const AlgebraHom<T>& f);
// Parity operator: (-1)^{|x|} x.
template <class T>
AlgebraHom<T> parity_operator(const AlgebraPtr<T>& a);
template <class T>
AlgebraHom<T> tensor_hom(const AlgebraHom<T>& f, const AlgebraHom<T>& g, const AlgebraPtr<T>& src,
                         const AlgebraPtr<T>& tgt);

template <class T>
struct UnitElement {
  AlgebraPtr<T> algebra;
  Vec<T> value;
  int parity = 0;
  Vec<T> inverse;

  static UnitElement one(const AlgebraPtr<T>& a);
  static std::optional<UnitElement> from(const AlgebraPtr<T>& a, const Vec<T>& v);
  UnitElement operator*(const UnitElement& o) const;
  UnitElement inv() const;
  bool operator==(const UnitElement& o) const { return value == o.value; }
};

// i(u): x -> u x u^{-1}
template <class T>
AlgebraHom<T> conjugation(const UnitElement<T>& u);
template <class T>
UnitElement<T> apply_hom(const AlgebraHom<T>& f, const UnitElement<T>& u);

// Outcome of the invertible-element search over a linear subspace.
enum class SearchStatus { Found, ZeroSpace, NotFound };

template <class T>
struct SearchResult {
  SearchStatus status = SearchStatus::NotFound;
  std::optional<UnitElement<T>> unit;
};

// Searches span(columns of basis) for a unit: a deterministic grid of
// {-1,0,1} coefficient vectors (at most 3^5 points) followed by 64 random samples.
template <class T>
SearchResult<T> find_unit(const AlgebraPtr<T>& a, const Mat<T>& basis, Rng& rng);

// Basis (as columns) of the even or odd part.
template <class T>
Mat<T> homogeneous_basis(const SuperVectorSpace& s, int parity);

template <class T>
Mat<T> even_center(const AlgebraPtr<T>& a);
// Ordinary center of the whole algebra.
template <class T>
Mat<T> full_center(const AlgebraPtr<T>& a);

template <class T>
struct CentralSimpleResult {
  bool central_simple = false;
  Vec<T> witness;  // kernel vector of the enveloping map when not central simple
};

template <class T>
CentralSimpleResult<T> is_central_simple(const AlgebraPtr<T>& a);

template <class T>
struct HH1Result {
  int dimension = 0;
  int derivations = 0;
  int inner = 0;
  std::vector<Mat<T>> representatives;  // outer derivations as matrices
};

template <class T>
HH1Result<T> hh1(const AlgebraPtr<T>& a);

// Even unit b with phi(x) b = b x for all x, if found.
template <class T>
SearchResult<T> inner_witness(const AlgebraHom<T>& phi, Rng& rng);

}  // namespace super2vec
