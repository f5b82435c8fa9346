#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

namespace super2vec {

// Dense integer matrix, row major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

  static IntMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  mpz_class& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const mpz_class& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  IntMatrix operator*(const IntMatrix& o) const;
  std::vector<mpz_class> apply(const std::vector<mpz_class>& v) const;
  IntMatrix transpose() const;
  bool is_zero() const;
  bool operator==(const IntMatrix& o) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<mpz_class> data_;
};

struct SmithForm {
  IntMatrix d;
  IntMatrix u;
  IntMatrix v;
  // Inverses of u and v, maintained alongside the elimination.
  IntMatrix u_inv;
  IntMatrix v_inv;
  int rank = 0;
  mpz_class diag(int i) const { return i < d.rows() && i < d.cols() ? d(i, i) : mpz_class(0); }
};

// D = U * M * V with D diagonal, d_i | d_{i+1}, d_i >= 0.
SmithForm smith_normal_form(const IntMatrix& m);

// Integer solution of m * x = b, if one exists.
std::optional<std::vector<mpz_class>> solve_integer(const IntMatrix& m, const std::vector<mpz_class>& b);

// Cochain complex over the integers: delta[n] maps degree n to degree n+1.
struct IntegerChainComplex {
  std::vector<int> ranks;
  std::vector<IntMatrix> delta;

  void validate() const;
};

struct CohomologyGroup;

// Outcome of classifying a cochain in a cohomology group.
struct ClassResult {
  bool is_cocycle = false;
  // Coordinates along the nontrivial cyclic factors, reduced.
  std::vector<mpz_class> coordinates;
  bool is_zero() const;
};

struct CohomologyGroup {
  int degree = 0;
  int modulus = 0;  // 0 means integer coefficients
  std::vector<mpz_class> orders;  // 0 denotes an infinite cyclic factor
  std::vector<std::vector<mpz_class>> generators;

  ClassResult classify(const std::vector<mpz_class>& cochain) const;
  bool is_cocycle(const std::vector<mpz_class>& cochain) const;

  // Internal data for classification.
  IntMatrix next_delta;
  std::vector<std::vector<mpz_class>> kernel_columns;  // lattice basis of cocycles
  IntMatrix v_inv;                                      // from the SNF of next_delta
  std::vector<int> kernel_index;                        // which SNF coordinates survive
  std::vector<mpz_class> kernel_scale;
  IntMatrix u_relations;  // U' of the relation SNF
  std::vector<int> factor_rows;
};

CohomologyGroup cohomology(const IntegerChainComplex& c, int modulus, int degree);

}  // namespace super2vec
