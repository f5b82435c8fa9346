#include "super2vec/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace super2vec {

namespace {

void check_cap(Index cols) {
  if (cols > kSolverColumnCap)
    throw std::length_error("linear system exceeds the " + std::to_string(kSolverColumnCap) +
                            "-column solver cap");
}

}  // namespace

template <class T>
RowEchelon<T>::RowEchelon(Index cols) : cols_(cols), scratch_(cols), touched_(cols, 0) {
  check_cap(cols);
}

template <class T>
SparseRow<T> RowEchelon<T>::reduce(const SparseRow<T>& row) const {
  std::vector<Index> support;
  for (const auto& [j, c] : row) {
    if (is_zero(c)) continue;
    if (!touched_[j]) {
      touched_[j] = 1;
      support.push_back(j);
      scratch_[j] = c;
    } else {
      scratch_[j] += c;
    }
  }
  for (const auto& [p, prow] : rows_) {
    if (!touched_[p] || is_zero(scratch_[p])) continue;
    T f = scratch_[p];
    for (const auto& [j, c] : prow) {
      if (!touched_[j]) {
        touched_[j] = 1;
        support.push_back(j);
        scratch_[j] = -(f * c);
      } else {
        scratch_[j] -= f * c;
      }
    }
  }
  std::sort(support.begin(), support.end());
  SparseRow<T> out;
  for (Index j : support) {
    if (!is_zero(scratch_[j])) out.emplace_back(j, scratch_[j]);
    scratch_[j] = T(0);
    touched_[j] = 0;
  }
  return out;
}

template <class T>
bool RowEchelon<T>::add_row(const SparseRow<T>& row) {
  SparseRow<T> r = reduce(row);
  if (r.empty()) return false;
  T inv = T(1) / r.front().second;
  for (auto& e : r) e.second *= inv;
  Index p = r.front().first;
  rows_.emplace(p, std::move(r));
  return true;
}

template <class T>
bool RowEchelon<T>::add_row(const Vec<T>& row) {
  return add_row(to_sparse<T>(row));
}

template <class T>
std::vector<Index> RowEchelon<T>::pivots() const {
  std::vector<Index> out;
  for (const auto& kv : rows_) out.push_back(kv.first);
  return out;
}

template <class T>
std::vector<Index> RowEchelon<T>::free_columns() const {
  std::vector<Index> out;
  for (Index j = 0; j < cols_; ++j)
    if (!rows_.count(j)) out.push_back(j);
  return out;
}

template <class T>
Vec<T> RowEchelon<T>::back_substitute(const std::map<Index, T>& free_values) const {
  Vec<T> v = Vec<T>::Zero(cols_);
  for (const auto& [j, c] : free_values) v(j) = c;
  for (auto it = rows_.rbegin(); it != rows_.rend(); ++it) {
    T acc(0);
    for (const auto& [j, c] : it->second)
      if (j != it->first && !is_zero(v(j))) acc += c * v(j);
    v(it->first) = -acc;
  }
  return v;
}

template <class T>
Mat<T> RowEchelon<T>::kernel() const {
  auto fc = free_columns();
  Mat<T> k(cols_, static_cast<Index>(fc.size()));
  for (size_t i = 0; i < fc.size(); ++i) k.col(static_cast<Index>(i)) = back_substitute({{fc[i], T(1)}});
  return k;
}

template <class T>
SparseRow<T> to_sparse(const Eigen::Ref<const Vec<T>>& v) {
  SparseRow<T> out;
  for (Index j = 0; j < v.size(); ++j)
    if (!is_zero(v(j))) out.emplace_back(j, v(j));
  return out;
}

template <class T>
bool is_zero(const Mat<T>& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!is_zero(m(i, j))) return false;
  return true;
}

template <class T>
bool is_zero_vec(const Vec<T>& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (!is_zero(v(i))) return false;
  return true;
}

template <class T>
static RowEchelon<T> echelon_of_rows(const Mat<T>& m) {
  RowEchelon<T> e(m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    SparseRow<T> r;
    for (Index j = 0; j < m.cols(); ++j)
      if (!is_zero(m(i, j))) r.emplace_back(j, m(i, j));
    e.add_row(r);
  }
  return e;
}

template <class T>
Index rank(const Mat<T>& m) {
  if (m.rows() < m.cols()) {
    Mat<T> t = m.transpose();
    return echelon_of_rows<T>(t).rank();
  }
  return echelon_of_rows<T>(m).rank();
}

template <class T>
Mat<T> kernel(const Mat<T>& m) {
  return echelon_of_rows<T>(m).kernel();
}

template <class T>
AffineSolution<T> solve_linear(const Mat<T>& a, const Vec<T>& b) {
  if (a.rows() != b.size()) throw std::invalid_argument("solve_linear: dimension mismatch");
  const Index n = a.cols();
  RowEchelon<T> e(n + 1);
  for (Index i = 0; i < a.rows(); ++i) {
    SparseRow<T> r;
    for (Index j = 0; j < n; ++j)
      if (!is_zero(a(i, j))) r.emplace_back(j, a(i, j));
    if (!is_zero(b(i))) r.emplace_back(n, b(i));
    e.add_row(r);
  }
  AffineSolution<T> out;
  auto piv = e.pivots();
  bool consistent = piv.empty() || piv.back() != n;
  auto fc = e.free_columns();
  out.kernel = Mat<T>(n, 0);
  std::vector<Vec<T>> ks;
  for (Index f : fc) {
    if (f == n) continue;
    ks.push_back(e.back_substitute({{f, T(1)}}).head(n));
  }
  out.kernel.resize(n, static_cast<Index>(ks.size()));
  for (size_t i = 0; i < ks.size(); ++i) out.kernel.col(static_cast<Index>(i)) = ks[i];
  if (consistent) out.particular = e.back_substitute({{n, T(-1)}}).head(n);
  return out;
}

template <class T>
std::optional<Mat<T>> solve_matrix(const Mat<T>& a, const Mat<T>& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("solve_matrix: dimension mismatch");
  Coordinates<T> c(column_basis<T>(a));
  // Express columns of b through an independent subset of the columns of a.
  std::vector<Index> chosen;
  {
    RowEchelon<T> e(a.rows());
    for (Index j = 0; j < a.cols(); ++j)
      if (e.add_row(Vec<T>(a.col(j)))) chosen.push_back(j);
  }
  Mat<T> x = Mat<T>::Zero(a.cols(), b.cols());
  for (Index k = 0; k < b.cols(); ++k) {
    auto co = c.of(b.col(k));
    if (!co) return std::nullopt;
    for (size_t i = 0; i < chosen.size(); ++i) x(chosen[i], k) = (*co)(static_cast<Index>(i));
  }
  return x;
}

template <class T>
std::optional<Mat<T>> inverse(const Mat<T>& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  const Index n = m.rows();
  check_cap(2 * n);
  // Gauss-Jordan on [m | I] with dense rows.
  Mat<T> a(n, 2 * n);
  a.leftCols(n) = m;
  a.rightCols(n) = identity<T>(n);
  for (Index c = 0; c < n; ++c) {
    Index p = c;
    while (p < n && is_zero(a(p, c))) ++p;
    if (p == n) return std::nullopt;
    if (p != c) a.row(p).swap(a.row(c));
    T inv = T(1) / a(c, c);
    for (Index j = c; j < 2 * n; ++j)
      if (!is_zero(a(c, j))) a(c, j) *= inv;
    for (Index i = 0; i < n; ++i) {
      if (i == c || is_zero(a(i, c))) continue;
      T f = a(i, c);
      for (Index j = c; j < 2 * n; ++j)
        if (!is_zero(a(c, j))) a(i, j) -= f * a(c, j);
    }
  }
  return Mat<T>(a.rightCols(n));
}

template <class T>
Mat<T> column_basis(const Mat<T>& m) {
  RowEchelon<T> e(m.rows());
  std::vector<Index> keep;
  for (Index j = 0; j < m.cols(); ++j)
    if (e.add_row(Vec<T>(m.col(j)))) keep.push_back(j);
  Mat<T> out(m.rows(), static_cast<Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) out.col(static_cast<Index>(i)) = m.col(keep[i]);
  return out;
}

template <class T>
Mat<T> kron(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> out = Mat<T>::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) {
      if (is_zero(a(i, j))) continue;
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l)
          if (!is_zero(b(k, l))) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    }
  return out;
}

template <class T>
Mat<T> mul(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("mul: dimension mismatch");
  std::vector<std::vector<std::pair<Index, const T*>>> cols(a.cols());
  for (Index k = 0; k < a.cols(); ++k)
    for (Index i = 0; i < a.rows(); ++i)
      if (!is_zero(a(i, k))) cols[k].emplace_back(i, &a(i, k));
  Mat<T> out = Mat<T>::Zero(a.rows(), b.cols());
  T tmp;
  for (Index j = 0; j < b.cols(); ++j)
    for (Index k = 0; k < b.rows(); ++k) {
      const T& bk = b(k, j);
      if (is_zero(bk)) continue;
      for (const auto& [i, v] : cols[k]) {
        tmp = *v * bk;
        out(i, j) += tmp;
      }
    }
  return out;
}

template <class T>
Vec<T> mul(const Mat<T>& a, const Vec<T>& v) {
  if (a.cols() != v.size()) throw std::invalid_argument("mul: dimension mismatch");
  Vec<T> out = Vec<T>::Zero(a.rows());
  T tmp;
  for (Index k = 0; k < v.size(); ++k) {
    if (is_zero(v(k))) continue;
    for (Index i = 0; i < a.rows(); ++i)
      if (!is_zero(a(i, k))) {
        tmp = a(i, k) * v(k);
        out(i) += tmp;
      }
  }
  return out;
}

template <class T>
Mat<T> identity(Index n) {
  Mat<T> m = Mat<T>::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = T(1);
  return m;
}

template <class T>
Vec<T> unit_vector(Index n, Index i) {
  Vec<T> v = Vec<T>::Zero(n);
  v(i) = T(1);
  return v;
}

template <class T>
Coordinates<T>::Coordinates(Mat<T> basis) : basis_(std::move(basis)) {
  RowEchelon<T> e(basis_.cols());
  for (Index i = 0; i < basis_.rows() && e.rank() < basis_.cols(); ++i)
    if (e.add_row(Vec<T>(basis_.row(i).transpose()))) rows_.push_back(i);
  if (static_cast<Index>(rows_.size()) != basis_.cols())
    throw std::invalid_argument("Coordinates: basis columns are dependent");
  Mat<T> sub(basis_.cols(), basis_.cols());
  for (size_t k = 0; k < rows_.size(); ++k) sub.row(static_cast<Index>(k)) = basis_.row(rows_[k]);
  solve_ = *inverse<T>(sub);
}

template <class T>
Vec<T> Coordinates<T>::of_unchecked(const Vec<T>& v) const {
  Vec<T> sub(static_cast<Index>(rows_.size()));
  for (size_t k = 0; k < rows_.size(); ++k) sub(static_cast<Index>(k)) = v(rows_[k]);
  return solve_ * sub;
}

template <class T>
std::optional<Vec<T>> Coordinates<T>::of(const Vec<T>& v) const {
  Vec<T> c = of_unchecked(v);
  Vec<T> back = basis_ * c;
  if (back != v) return std::nullopt;
  return c;
}

SuperVectorSpace::SuperVectorSpace(int e, int o) : even(e), odd(o) {
  for (int i = 0; i < e; ++i) labels.push_back("e" + std::to_string(i));
  for (int i = 0; i < o; ++i) labels.push_back("o" + std::to_string(i));
}

SuperVectorSpace::SuperVectorSpace(int e, int o, std::vector<std::string> l)
    : even(e), odd(o), labels(std::move(l)) {
  validate();
}

void SuperVectorSpace::validate() const {
  if (even < 0 || odd < 0) throw std::invalid_argument("negative super dimension");
  if (static_cast<int>(labels.size()) != even + odd)
    throw std::invalid_argument("label count does not match super dimension");
}

SuperVectorSpace SuperVectorSpace::flipped() const { return SuperVectorSpace(odd, even); }

template <class T>
bool has_parity(const SuperVectorSpace& src, const SuperVectorSpace& tgt, const Mat<T>& m, int parity) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!is_zero(m(i, j)) && ((src.parity(j) + parity) & 1) != tgt.parity(i)) return false;
  return true;
}

template <class T>
void GradedMap<T>::validate() const {
  if (matrix.rows() != target.dim() || matrix.cols() != source.dim())
    throw std::invalid_argument("graded map shape mismatch");
  if (!has_parity(source, target, matrix, parity))
    throw std::invalid_argument("graded map violates its declared parity");
}

template <class T>
int vector_parity(const SuperVectorSpace& s, const Vec<T>& v) {
  bool ev = false, od = false;
  for (Index i = 0; i < v.size(); ++i)
    if (!is_zero(v(i))) (s.parity(i) ? od : ev) = true;
  if (ev && od) return -1;
  return od ? 1 : 0;
}

#define S2V_INSTANTIATE(T)                                                                   \
  template class RowEchelon<T>;                                                              \
  template class Coordinates<T>;                                                             \
  template struct GradedMap<T>;                                                              \
  template SparseRow<T> to_sparse<T>(const Eigen::Ref<const Vec<T>>&);                        \
  template bool is_zero<T>(const Mat<T>&);                                                   \
  template bool is_zero_vec<T>(const Vec<T>&);                                               \
  template Index rank<T>(const Mat<T>&);                                                     \
  template Mat<T> kernel<T>(const Mat<T>&);                                                  \
  template AffineSolution<T> solve_linear<T>(const Mat<T>&, const Vec<T>&);                  \
  template std::optional<Mat<T>> solve_matrix<T>(const Mat<T>&, const Mat<T>&);              \
  template std::optional<Mat<T>> inverse<T>(const Mat<T>&);                                  \
  template Mat<T> column_basis<T>(const Mat<T>&);                                            \
  template Mat<T> kron<T>(const Mat<T>&, const Mat<T>&);                                     \
  template Mat<T> mul<T>(const Mat<T>&, const Mat<T>&);                                      \
  template Vec<T> mul<T>(const Mat<T>&, const Vec<T>&);                                      \
  template Mat<T> identity<T>(Index);                                                        \
  template Vec<T> unit_vector<T>(Index, Index);                                              \
  template int vector_parity<T>(const SuperVectorSpace&, const Vec<T>&);                     \
  template bool has_parity<T>(const SuperVectorSpace&, const SuperVectorSpace&, const Mat<T>&, int);

S2V_INSTANTIATE(Rational)
S2V_INSTANTIATE(Gaussian)

}  // namespace super2vec
