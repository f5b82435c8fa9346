#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "super2vec/scalar.hpp"

namespace super2vec {

using Index = Eigen::Index;

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using SparseRow = std::vector<std::pair<Index, T>>;

// Column bound for every solver entry point.
constexpr Index kSolverColumnCap = 4096;

// Row echelon form built one row at a time. Rows are stored sparse with a
// unit pivot; reduction of incoming rows uses a dense scratch buffer.
template <class T>
class RowEchelon {
 public:
  explicit RowEchelon(Index cols);

  // Returns true when the row is independent of the rows already present.
  bool add_row(const SparseRow<T>& row);
  bool add_row(const Vec<T>& row);
  // Residual of a row after reduction by the stored rows.
  SparseRow<T> reduce(const SparseRow<T>& row) const;

  Index cols() const { return cols_; }
  Index rank() const { return static_cast<Index>(rows_.size()); }
  std::vector<Index> pivots() const;
  std::vector<Index> free_columns() const;
  // Solution of the homogeneous system given values on the free columns.
  Vec<T> back_substitute(const std::map<Index, T>& free_values) const;
  // Null space of the row span, one column per free column.
  Mat<T> kernel() const;

 private:
  Index cols_;
  std::map<Index, SparseRow<T>> rows_;
  mutable std::vector<T> scratch_;
  mutable std::vector<char> touched_;
};

template <class T>
struct AffineSolution {
  std::optional<Vec<T>> particular;
  Mat<T> kernel;
};

template <class T>
SparseRow<T> to_sparse(const Eigen::Ref<const Vec<T>>& v);

template <class T>
bool is_zero(const Mat<T>& m);
template <class T>
bool is_zero_vec(const Vec<T>& v);

template <class T>
Index rank(const Mat<T>& m);
// Columns spanning ker(m).
template <class T>
Mat<T> kernel(const Mat<T>& m);
template <class T>
AffineSolution<T> solve_linear(const Mat<T>& a, const Vec<T>& b);
// X with a*X = b when one exists.
template <class T>
std::optional<Mat<T>> solve_matrix(const Mat<T>& a, const Mat<T>& b);
template <class T>
std::optional<Mat<T>> inverse(const Mat<T>& m);
// Maximal independent subset of the columns, in order.
template <class T>
Mat<T> column_basis(const Mat<T>& m);
template <class T>
Mat<T> kron(const Mat<T>& a, const Mat<T>& b);
// Products that skip zero entries; the structure matrices here are sparse.
template <class T>
Mat<T> mul(const Mat<T>& a, const Mat<T>& b);
template <class T>
Vec<T> mul(const Mat<T>& a, const Vec<T>& v);
template <class T>
Mat<T> identity(Index n);
template <class T>
Vec<T> unit_vector(Index n, Index i);

// Coordinates of vectors with respect to a fixed set of independent columns.
template <class T>
class Coordinates {
 public:
  Coordinates() = default;
  explicit Coordinates(Mat<T> basis);

  Index size() const { return basis_.cols(); }
  const Mat<T>& basis() const { return basis_; }
  // Coordinates of v, or none when v is outside the span.
  std::optional<Vec<T>> of(const Vec<T>& v) const;
  // Coordinates of v, assuming membership.
  Vec<T> of_unchecked(const Vec<T>& v) const;

 private:
  Mat<T> basis_;
  std::vector<Index> rows_;
  Mat<T> solve_;
};

struct SuperVectorSpace {
  int even = 0;
  int odd = 0;
  std::vector<std::string> labels;

  SuperVectorSpace() = default;
  SuperVectorSpace(int e, int o);
  SuperVectorSpace(int e, int o, std::vector<std::string> l);

  int dim() const { return even + odd; }
  int parity(Index i) const { return i >= even ? 1 : 0; }
  bool operator==(const SuperVectorSpace& other) const {
    return even == other.even && odd == other.odd;
  }
  void validate() const;
  // Label-free copy with gradings swapped.
  SuperVectorSpace flipped() const;
};

template <class T>
struct GradedMap {
  SuperVectorSpace source;
  SuperVectorSpace target;
  Mat<T> matrix;
  int parity = 0;

  void validate() const;
};

// Parity of a homogeneous vector, or -1 when mixed, or 0 for the zero vector.
template <class T>
int vector_parity(const SuperVectorSpace& s, const Vec<T>& v);
// True when the matrix maps degree d to degree d + parity.
template <class T>
bool has_parity(const SuperVectorSpace& src, const SuperVectorSpace& tgt, const Mat<T>& m, int parity);

}  // namespace super2vec
