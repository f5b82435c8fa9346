#include "super2vec/algebra.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace super2vec {

PairLayout::PairLayout(const SuperVectorSpace& a, const SuperVectorSpace& b, const std::string& sep)
    : left_dim(a.dim()), right_dim(b.dim()) {
  position.assign(static_cast<size_t>(left_dim) * right_dim, -1);
  std::vector<std::string> labels;
  int evens = 0;
  for (int p = 0; p < 2; ++p)
    for (int i = 0; i < left_dim; ++i)
      for (int j = 0; j < right_dim; ++j)
        if (((a.parity(i) + b.parity(j)) & 1) == p) {
          position[static_cast<size_t>(i) * right_dim + j] = static_cast<int>(pairs.size());
          pairs.emplace_back(i, j);
          const std::string& la = i < static_cast<int>(a.labels.size()) ? a.labels[i] : std::to_string(i);
          const std::string& lb = j < static_cast<int>(b.labels.size()) ? b.labels[j] : std::to_string(j);
          labels.push_back(la + sep + lb);
          if (p == 0) ++evens;
        }
  space = SuperVectorSpace(evens, static_cast<int>(pairs.size()) - evens, labels);
}

template <class T>
SuperAlgebra<T>::SuperAlgebra(SuperVectorSpace carrier, Table table, Vec<T> unit, std::string name)
    : carrier_(std::move(carrier)), table_(std::move(table)), unit_(std::move(unit)), name_(std::move(name)) {}

template <class T>
Vec<T> SuperAlgebra<T>::multiply(const Vec<T>& x, const Vec<T>& y) const {
  Vec<T> r = Vec<T>::Zero(dim());
  for (int i = 0; i < dim(); ++i) {
    if (is_zero(x(i))) continue;
    for (int j = 0; j < dim(); ++j) {
      if (is_zero(y(j))) continue;
      T f = x(i) * y(j);
      for (const auto& [k, c] : table_[i][j]) r(k) += f * c;
    }
  }
  return r;
}

template <class T>
Mat<T> SuperAlgebra<T>::left_mult(const Vec<T>& x) const {
  Mat<T> m = Mat<T>::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) {
    if (is_zero(x(i))) continue;
    for (int j = 0; j < dim(); ++j)
      for (const auto& [k, c] : table_[i][j]) m(k, j) += x(i) * c;
  }
  return m;
}

template <class T>
Mat<T> SuperAlgebra<T>::right_mult(const Vec<T>& x) const {
  Mat<T> m = Mat<T>::Zero(dim(), dim());
  for (int j = 0; j < dim(); ++j) {
    if (is_zero(x(j))) continue;
    for (int i = 0; i < dim(); ++i)
      for (const auto& [k, c] : table_[i][j]) m(k, i) += x(j) * c;
  }
  return m;
}

template <class T>
Mat<T> SuperAlgebra<T>::left_basis(int i) const {
  Mat<T> m = Mat<T>::Zero(dim(), dim());
  for (int j = 0; j < dim(); ++j)
    for (const auto& [k, c] : table_[i][j]) m(k, j) += c;
  return m;
}

template <class T>
Mat<T> SuperAlgebra<T>::right_basis(int j) const {
  Mat<T> m = Mat<T>::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i)
    for (const auto& [k, c] : table_[i][j]) m(k, i) += c;
  return m;
}

template <class T>
std::optional<Vec<T>> SuperAlgebra<T>::inverse_of(const Vec<T>& x) const {
  auto sol = solve_linear<T>(left_mult(x), unit_);
  if (!sol.particular) return std::nullopt;
  return sol.particular;
}

template <class T>
bool SuperAlgebra<T>::same_table(const SuperAlgebra& o) const {
  return carrier_ == o.carrier_ && unit_ == o.unit_ && table_ == o.table_;
}

template <class T>
std::vector<std::string> check_algebra(const SuperAlgebra<T>& a) {
  std::vector<std::string> errs;
  const int d = a.dim();
  try {
    a.carrier().validate();
  } catch (const std::exception& e) {
    errs.push_back(e.what());
    return errs;
  }
  if (static_cast<int>(a.table().size()) != d || a.unit().size() != d) {
    errs.push_back("structure table or unit has wrong size");
    return errs;
  }
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(a.table()[i].size()) != d) {
      errs.push_back("structure table row " + std::to_string(i) + " has wrong size");
      return errs;
    }
    for (int j = 0; j < d; ++j)
      for (const auto& [k, c] : a.product(i, j)) {
        if (k < 0 || k >= d) {
          errs.push_back("product index out of range");
          return errs;
        }
        if (!is_zero(c) && a.parity(k) != ((a.parity(i) + a.parity(j)) & 1))
          errs.push_back("parity violation: e" + std::to_string(i) + "*e" + std::to_string(j) + " has a component on e" +
                         std::to_string(k));
      }
  }
  if (!errs.empty()) return errs;
  if (a.element_parity(a.unit()) != 0) errs.push_back("unit is not even");
  for (int i = 0; i < d; ++i) {
    Vec<T> e = a.basis(i);
    if (a.multiply(a.unit(), e) != e || a.multiply(e, a.unit()) != e) {
      errs.push_back("unit fails on basis element " + std::to_string(i));
      break;
    }
  }
  Vec<T> acc(d);
  for (int i = 0; i < d && errs.size() < 10; ++i)
    for (int j = 0; j < d && errs.size() < 10; ++j)
      for (int k = 0; k < d && errs.size() < 10; ++k) {
        acc.setZero();
        for (const auto& [m, c] : a.product(i, j))
          for (const auto& [n, c2] : a.product(m, k)) acc(n) += c * c2;
        for (const auto& [m, c] : a.product(j, k))
          for (const auto& [n, c2] : a.product(i, m)) acc(n) -= c * c2;
        if (!is_zero_vec<T>(acc))
          errs.push_back("non-associative on basis triple (" + std::to_string(i) + "," + std::to_string(j) + "," +
                         std::to_string(k) + ")");
      }
  return errs;
}

template <class T>
AlgebraPtr<T> make_algebra(SuperVectorSpace carrier, typename SuperAlgebra<T>::Table table, Vec<T> unit,
                           std::string name) {
  auto a = std::make_shared<SuperAlgebra<T>>(std::move(carrier), std::move(table), std::move(unit), std::move(name));
  auto errs = check_algebra(*a);
  if (!errs.empty()) throw std::invalid_argument("invalid super algebra: " + errs.front());
  return a;
}

namespace {

template <class T>
typename SuperAlgebra<T>::Table empty_table(int d) {
  return typename SuperAlgebra<T>::Table(d, std::vector<SparseRow<T>>(d));
}

}  // namespace

template <class T>
AlgebraPtr<T> ground_field() {
  auto t = empty_table<T>(1);
  t[0][0] = {{0, T(1)}};
  return std::make_shared<SuperAlgebra<T>>(SuperVectorSpace(1, 0, {"1"}), t, unit_vector<T>(1, 0), "k");
}

template <class T>
AlgebraPtr<T> dual_numbers(int eps_parity) {
  auto t = empty_table<T>(2);
  t[0][0] = {{0, T(1)}};
  t[0][1] = {{1, T(1)}};
  t[1][0] = {{1, T(1)}};
  SuperVectorSpace s = eps_parity ? SuperVectorSpace(1, 1, {"1", "eps"}) : SuperVectorSpace(2, 0, {"1", "eps"});
  return std::make_shared<SuperAlgebra<T>>(s, t, unit_vector<T>(2, 0), eps_parity ? "k[eps odd]" : "k[eps even]");
}

template <class T>
AlgebraPtr<T> split_pair() {
  auto t = empty_table<T>(2);
  t[0][0] = {{0, T(1)}};
  t[1][1] = {{1, T(1)}};
  Vec<T> u(2);
  u << T(1), T(1);
  return std::make_shared<SuperAlgebra<T>>(SuperVectorSpace(2, 0, {"p1", "p2"}), t, u, "k+k");
}

template <class T>
AlgebraPtr<T> endomorphism_algebra(int even, int odd) {
  const int n = even + odd;
  auto par = [&](int r) { return r >= even ? 1 : 0; };
  std::vector<std::pair<int, int>> units;
  for (int p = 0; p < 2; ++p)
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s)
        if (((par(r) + par(s)) & 1) == p) units.emplace_back(r, s);
  std::map<std::pair<int, int>, int> pos;
  std::vector<std::string> labels;
  int evens = 0;
  for (size_t k = 0; k < units.size(); ++k) {
    pos[units[k]] = static_cast<int>(k);
    labels.push_back("E" + std::to_string(units[k].first) + "_" + std::to_string(units[k].second));
    if (((par(units[k].first) + par(units[k].second)) & 1) == 0) ++evens;
  }
  const int d = n * n;
  auto t = empty_table<T>(d);
  Vec<T> unit = Vec<T>::Zero(d);
  for (int a = 0; a < d; ++a) {
    auto [r, s] = units[a];
    if (r == s) unit(a) = T(1);
    for (int b = 0; b < d; ++b) {
      auto [s2, u] = units[b];
      if (s == s2) t[a][b] = {{pos[{r, u}], T(1)}};
    }
  }
  return std::make_shared<SuperAlgebra<T>>(SuperVectorSpace(evens, d - evens, labels), t, unit,
                                           "End(k^" + std::to_string(even) + "|" + std::to_string(odd) + ")");
}

template <class T>
AlgebraPtr<T> clifford(int p, int q) {
  const int n = p + q;
  if (p < 0 || q < 0 || n > 8) throw std::invalid_argument("Clifford signature outside the p+q <= 8 cap");
  std::vector<int> masks;
  for (int par = 0; par < 2; ++par) {
    std::vector<int> part;
    for (int m = 0; m < (1 << n); ++m)
      if ((__builtin_popcount(m) & 1) == par) part.push_back(m);
    std::stable_sort(part.begin(), part.end(),
                     [](int a, int b) { return __builtin_popcount(a) < __builtin_popcount(b); });
    masks.insert(masks.end(), part.begin(), part.end());
  }
  std::vector<int> pos(1 << n);
  std::vector<std::string> labels;
  for (size_t k = 0; k < masks.size(); ++k) {
    pos[masks[k]] = static_cast<int>(k);
    std::string l;
    for (int g = 0; g < n; ++g)
      if (masks[k] & (1 << g)) l += "e" + std::to_string(g + 1);
    labels.push_back(l.empty() ? "1" : l);
  }
  const int d = 1 << n;
  auto t = empty_table<T>(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      int s = masks[a], u = masks[b];
      int sign = 0;
      // Moving each generator of u leftwards past the larger generators of s.
      for (int g = 0; g < n; ++g)
        if (u & (1 << g)) sign += __builtin_popcount(s >> (g + 1));
      for (int g = 0; g < n; ++g)
        if ((s & u & (1 << g)) && g >= p) sign += 1;
      t[a][b] = {{pos[s ^ u], (sign & 1) ? T(-1) : T(1)}};
    }
  int evens = d / 2 + (n == 0 ? 1 : 0);
  if (n == 0) evens = 1;
  std::string name = "Cl(" + std::to_string(p) + "," + std::to_string(q) + ")";
  return std::make_shared<SuperAlgebra<T>>(SuperVectorSpace(evens, d - evens, labels), t, unit_vector<T>(d, 0), name);
}

template <class T>
Vec<T> tensor_element(const PairLayout& layout, const Vec<T>& x, const Vec<T>& y) {
  Vec<T> r = Vec<T>::Zero(static_cast<Index>(layout.pairs.size()));
  for (int i = 0; i < x.size(); ++i) {
    if (is_zero(x(i))) continue;
    for (int j = 0; j < y.size(); ++j)
      if (!is_zero(y(j))) r(layout.at(i, j)) = x(i) * y(j);
  }
  return r;
}

template <class T>
AlgebraPtr<T> graded_tensor(const AlgebraPtr<T>& a, const AlgebraPtr<T>& b) {
  PairLayout lay(a->carrier(), b->carrier());
  const int d = static_cast<int>(lay.pairs.size());
  auto t = empty_table<T>(d);
  for (int x = 0; x < d; ++x) {
    auto [i, j] = lay.pairs[x];
    for (int y = 0; y < d; ++y) {
      auto [k, l] = lay.pairs[y];
      bool neg = b->parity(j) && a->parity(k);
      std::map<int, T> acc;
      for (const auto& [m, c] : a->product(i, k))
        for (const auto& [n, c2] : b->product(j, l)) acc[lay.at(m, n)] += neg ? -(c * c2) : c * c2;
      for (auto& [pidx, c] : acc)
        if (!is_zero(c)) t[x][y].emplace_back(pidx, c);
    }
  }
  std::string name = a->name() + "*" + b->name();
  return std::make_shared<SuperAlgebra<T>>(lay.space, t, tensor_element<T>(lay, a->unit(), b->unit()), name);
}

template <class T>
AlgebraPtr<T> graded_opposite(const AlgebraPtr<T>& a) {
  const int d = a->dim();
  auto t = empty_table<T>(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      bool neg = a->parity(i) && a->parity(j);
      for (const auto& [k, c] : a->product(j, i)) t[i][j].emplace_back(k, neg ? -c : c);
    }
  std::string name = a->name();
  const std::string suffix = "^op";
  if (name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
    name.resize(name.size() - suffix.size());
  else
    name += suffix;
  return std::make_shared<SuperAlgebra<T>>(a->carrier(), t, a->unit(), name);
}

template <class T>
AlgebraPtr<T> direct_product(const AlgebraPtr<T>& a, const AlgebraPtr<T>& b) {
  const auto& ca = a->carrier();
  const auto& cb = b->carrier();
  std::vector<int> from_a(ca.dim()), from_b(cb.dim());
  std::vector<std::string> labels;
  int k = 0;
  for (int p = 0; p < 2; ++p) {
    for (int i = 0; i < ca.dim(); ++i)
      if (ca.parity(i) == p) from_a[i] = k++, labels.push_back("(" + ca.labels[i] + ",0)");
    for (int i = 0; i < cb.dim(); ++i)
      if (cb.parity(i) == p) from_b[i] = k++, labels.push_back("(0," + cb.labels[i] + ")");
  }
  const int d = k;
  auto t = empty_table<T>(d);
  Vec<T> unit = Vec<T>::Zero(d);
  for (int i = 0; i < ca.dim(); ++i) {
    unit(from_a[i]) = a->unit()(i);
    for (int j = 0; j < ca.dim(); ++j)
      for (const auto& [m, c] : a->product(i, j)) t[from_a[i]][from_a[j]].emplace_back(from_a[m], c);
  }
  for (int i = 0; i < cb.dim(); ++i) {
    unit(from_b[i]) = b->unit()(i);
    for (int j = 0; j < cb.dim(); ++j)
      for (const auto& [m, c] : b->product(i, j)) t[from_b[i]][from_b[j]].emplace_back(from_b[m], c);
  }
  for (auto& row : t)
    for (auto& e : row) std::sort(e.begin(), e.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return std::make_shared<SuperAlgebra<T>>(SuperVectorSpace(ca.even + cb.even, ca.odd + cb.odd, labels), t, unit,
                                           a->name() + "+" + b->name());
}

template <class T>
AlgebraPtr<T> permute_basis(const AlgebraPtr<T>& a, const std::vector<int>& perm) {
  const int d = a->dim();
  std::vector<int> inv(d);
  for (int k = 0; k < d; ++k) inv[perm[k]] = k;
  std::vector<std::string> labels;
  int evens = 0;
  for (int k = 0; k < d; ++k) {
    labels.push_back(a->carrier().labels[perm[k]]);
    if (a->parity(perm[k]) == 0) ++evens;
  }
  auto t = empty_table<T>(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      for (const auto& [m, c] : a->product(perm[i], perm[j])) t[i][j].emplace_back(inv[m], c);
      std::sort(t[i][j].begin(), t[i][j].end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    }
  Vec<T> unit(d);
  for (int k = 0; k < d; ++k) unit(k) = a->unit()(perm[k]);
  return std::make_shared<SuperAlgebra<T>>(SuperVectorSpace(evens, d - evens, labels), t, unit, a->name());
}

template <class T>
std::vector<std::string> AlgebraHom<T>::check() const {
  std::vector<std::string> errs;
  if (map.rows() != target->dim() || map.cols() != source->dim()) {
    errs.push_back("homomorphism matrix has wrong shape");
    return errs;
  }
  if (!has_parity<T>(source->carrier(), target->carrier(), map, 0)) errs.push_back("homomorphism is not even");
  if (mul<T>(map, source->unit()) != target->unit()) errs.push_back("homomorphism does not preserve the unit");
  for (int i = 0; i < source->dim() && errs.size() < 10; ++i)
    for (int j = 0; j < source->dim() && errs.size() < 10; ++j) {
      Vec<T> lhs = Vec<T>::Zero(target->dim());
      for (const auto& [k, c] : source->product(i, j)) lhs += c * map.col(k);
      Vec<T> rhs = target->multiply(map.col(i), map.col(j));
      if (lhs != rhs)
        errs.push_back("not multiplicative on basis pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  return errs;
}

template <class T>
bool AlgebraHom<T>::is_automorphism() const {
  return same_algebra(source, target) && check().empty() && inverse<T>(map).has_value();
}

template <class T>
AlgebraHom<T> identity_hom(const AlgebraPtr<T>& a) {
  return {a, a, identity<T>(a->dim())};
}

template <class T>
AlgebraHom<T> compose(const AlgebraHom<T>& f, const AlgebraHom<T>& g) {
  return {g.source, f.target, mul<T>(f.map, g.map)};
}

template <class T>
AlgebraHom<T> inverse_hom(const AlgebraHom<T>& f) {
  auto inv = inverse<T>(f.map);
  if (!inv) throw std::invalid_argument("homomorphism is not invertible");
  return {f.target, f.source, *inv};
}

template <class T>
AlgebraHom<T> parity_operator(const AlgebraPtr<T>& a) {
  Mat<T> m = identity<T>(a->dim());
  for (int i = 0; i < a->dim(); ++i)
    if (a->parity(i)) m(i, i) = T(-1);
  return {a, a, m};
}

template <class T>
AlgebraHom<T> tensor_hom(const AlgebraHom<T>& f, const AlgebraHom<T>& g, const AlgebraPtr<T>& src,
                         const AlgebraPtr<T>& tgt) {
  PairLayout ls(f.source->carrier(), g.source->carrier());
  PairLayout lt(f.target->carrier(), g.target->carrier());
  Mat<T> m = Mat<T>::Zero(tgt->dim(), src->dim());
  for (size_t x = 0; x < ls.pairs.size(); ++x) {
    auto [i, j] = ls.pairs[x];
    m.col(static_cast<Index>(x)) = tensor_element<T>(lt, f.map.col(i), g.map.col(j));
  }
  return {src, tgt, m};
}

template <class T>
UnitElement<T> UnitElement<T>::one(const AlgebraPtr<T>& a) {
  return {a, a->unit(), 0, a->unit()};
}

template <class T>
std::optional<UnitElement<T>> UnitElement<T>::from(const AlgebraPtr<T>& a, const Vec<T>& v) {
  int p = a->element_parity(v);
  if (p < 0 || is_zero_vec<T>(v)) return std::nullopt;
  auto inv = a->inverse_of(v);
  if (!inv) return std::nullopt;
  return UnitElement<T>{a, v, p, *inv};
}

template <class T>
UnitElement<T> UnitElement<T>::operator*(const UnitElement& o) const {
  return {algebra, algebra->multiply(value, o.value), (parity + o.parity) & 1, algebra->multiply(o.inverse, inverse)};
}

template <class T>
UnitElement<T> UnitElement<T>::inv() const {
  return {algebra, inverse, parity, value};
}

template <class T>
AlgebraHom<T> conjugation(const UnitElement<T>& u) {
  const auto& a = u.algebra;
  return {a, a, mul<T>(a->left_mult(u.value), a->right_mult(u.inverse))};
}

template <class T>
UnitElement<T> apply_hom(const AlgebraHom<T>& f, const UnitElement<T>& u) {
  return {f.target, mul<T>(f.map, u.value), u.parity, mul<T>(f.map, u.inverse)};
}

template <class T>
Mat<T> homogeneous_basis(const SuperVectorSpace& s, int parity) {
  int n = parity ? s.odd : s.even;
  int off = parity ? s.even : 0;
  Mat<T> m = Mat<T>::Zero(s.dim(), n);
  for (int k = 0; k < n; ++k) m(off + k, k) = T(1);
  return m;
}

template <class T>
SearchResult<T> find_unit(const AlgebraPtr<T>& a, const Mat<T>& basis, Rng& rng) {
  SearchResult<T> res;
  const Index k = basis.cols();
  if (k == 0) {
    res.status = SearchStatus::ZeroSpace;
    return res;
  }
  const int r = static_cast<int>(std::min<Index>(k, 5));
  int total = 1;
  for (int i = 0; i < r; ++i) total *= 3;
  std::vector<std::vector<int>> grid;
  for (int code = 1; code < total; ++code) {
    std::vector<int> c(r);
    int x = code;
    for (int i = 0; i < r; ++i) c[i] = (x % 3) - 1, x /= 3;
    grid.push_back(c);
  }
  std::stable_sort(grid.begin(), grid.end(), [](const auto& u, const auto& v) {
    auto sz = [](const std::vector<int>& w) { return std::count_if(w.begin(), w.end(), [](int t) { return t != 0; }); };
    return sz(u) < sz(v);
  });
  for (const auto& c : grid) {
    Vec<T> v = Vec<T>::Zero(basis.rows());
    for (int i = 0; i < r; ++i)
      if (c[i]) v += (c[i] > 0 ? basis.col(i) : Vec<T>(-basis.col(i)));
    if (auto u = UnitElement<T>::from(a, v)) {
      res.status = SearchStatus::Found;
      res.unit = u;
      return res;
    }
  }
  for (int s = 0; s < 64; ++s) {
    Vec<T> v = Vec<T>::Zero(basis.rows());
    for (Index i = 0; i < k; ++i) v += Field<T>::sample(rng) * Vec<T>(basis.col(i));
    if (auto u = UnitElement<T>::from(a, v)) {
      res.status = SearchStatus::Found;
      res.unit = u;
      return res;
    }
  }
  res.status = SearchStatus::NotFound;
  return res;
}

namespace {

// Kernel of x -> (z x - x z) restricted to the given columns of A.
template <class T>
Mat<T> commutant(const AlgebraPtr<T>& a, const std::vector<int>& cols) {
  const int d = a->dim();
  const Index n = static_cast<Index>(cols.size());
  RowEchelon<T> e(n);
  for (int j = 0; j < d; ++j) {
    // component l of (e_c e_j - e_j e_c) for each chosen c
    std::vector<SparseRow<T>> rows(d);
    for (Index t = 0; t < n; ++t) {
      int c = cols[t];
      for (const auto& [l, v] : a->product(c, j)) rows[l].emplace_back(t, v);
      for (const auto& [l, v] : a->product(j, c)) rows[l].emplace_back(t, -v);
    }
    for (auto& r : rows) {
      std::map<Index, T> acc;
      for (auto& [t, v] : r) acc[t] += v;
      SparseRow<T> s;
      for (auto& [t, v] : acc)
        if (!is_zero(v)) s.emplace_back(t, v);
      if (!s.empty()) e.add_row(s);
    }
  }
  Mat<T> k = e.kernel();
  Mat<T> out = Mat<T>::Zero(d, k.cols());
  for (Index t = 0; t < n; ++t) out.row(cols[t]) = k.row(t);
  return out;
}

}  // namespace

template <class T>
Mat<T> even_center(const AlgebraPtr<T>& a) {
  std::vector<int> cols;
  for (int i = 0; i < a->carrier().even; ++i) cols.push_back(i);
  return commutant(a, cols);
}

template <class T>
Mat<T> full_center(const AlgebraPtr<T>& a) {
  std::vector<int> cols;
  for (int i = 0; i < a->dim(); ++i) cols.push_back(i);
  return commutant(a, cols);
}

template <class T>
CentralSimpleResult<T> is_central_simple(const AlgebraPtr<T>& a) {
  const int d = a->dim();
  if (static_cast<Index>(d) * d > kSolverColumnCap)
    throw std::length_error("is_central_simple: dim(A)^2 exceeds the solver cap");
  // Row (l, k): coefficient of e_l in the image of e_k; column (i, j): e_i (x) e_j.
  std::vector<SparseRow<T>> rows(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (const auto& [m, c] : a->product(i, k))
        for (int j = 0; j < d; ++j) {
          bool neg = a->parity(j) && a->parity(k);
          for (const auto& [l, c2] : a->product(m, j))
            rows[static_cast<size_t>(l) * d + k].emplace_back(static_cast<Index>(i) * d + j, neg ? -(c * c2) : c * c2);
        }
  RowEchelon<T> e(static_cast<Index>(d) * d);
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    SparseRow<T> merged;
    for (auto& [j, c] : r) {
      if (!merged.empty() && merged.back().first == j)
        merged.back().second += c;
      else
        merged.emplace_back(j, c);
    }
    e.add_row(merged);
  }
  CentralSimpleResult<T> res;
  res.central_simple = e.rank() == static_cast<Index>(d) * d;
  if (!res.central_simple) {
    auto fc = e.free_columns();
    res.witness = e.back_substitute({{fc.front(), T(1)}});
  }
  return res;
}

template <class T>
HH1Result<T> hh1(const AlgebraPtr<T>& a) {
  const int d = a->dim();
  std::vector<std::vector<int>> var(d, std::vector<int>(d, -1));
  std::vector<std::pair<int, int>> vars;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      if (a->parity(r) == a->parity(c)) {
        var[r][c] = static_cast<int>(vars.size());
        vars.emplace_back(r, c);
      }
  const Index nv = static_cast<Index>(vars.size());
  RowEchelon<T> der(nv);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::vector<std::map<Index, T>> rows(d);
      for (const auto& [c, v] : a->product(i, j))
        for (int l = 0; l < d; ++l)
          if (var[l][c] >= 0) rows[l][var[l][c]] += v;
      for (int r = 0; r < d; ++r) {
        if (var[r][i] >= 0)
          for (const auto& [l, v] : a->product(r, j)) rows[l][var[r][i]] -= v;
        if (var[r][j] >= 0)
          for (const auto& [l, v] : a->product(i, r)) rows[l][var[r][j]] -= v;
      }
      for (auto& row : rows) {
        SparseRow<T> s;
        for (auto& [t, v] : row)
          if (!is_zero(v)) s.emplace_back(t, v);
        if (!s.empty()) der.add_row(s);
      }
    }
  Mat<T> derivations = der.kernel();
  HH1Result<T> res;
  res.derivations = static_cast<int>(derivations.cols());
  RowEchelon<T> span(nv);
  for (int m = 0; m < a->carrier().even; ++m) {
    Mat<T> ad = a->left_basis(m) - a->right_basis(m);
    Vec<T> v(nv);
    for (Index t = 0; t < nv; ++t) v(t) = ad(vars[t].first, vars[t].second);
    span.add_row(v);
  }
  res.inner = static_cast<int>(span.rank());
  for (Index c = 0; c < derivations.cols(); ++c) {
    Vec<T> v = derivations.col(c);
    if (span.add_row(v)) {
      Mat<T> dm = Mat<T>::Zero(d, d);
      for (Index t = 0; t < nv; ++t) dm(vars[t].first, vars[t].second) = v(t);
      res.representatives.push_back(dm);
    }
  }
  res.dimension = static_cast<int>(res.representatives.size());
  return res;
}

template <class T>
SearchResult<T> inner_witness(const AlgebraHom<T>& phi, Rng& rng) {
  if (!phi.is_automorphism()) throw std::invalid_argument("inner_witness: map is not an automorphism");
  const auto& a = phi.source;
  const int d = a->dim();
  const int ne = a->carrier().even;
  Mat<T> sys(static_cast<Index>(d) * d, ne);
  for (int j = 0; j < d; ++j) {
    Mat<T> block = a->left_mult(phi.map.col(j)) - a->right_basis(j);
    sys.block(static_cast<Index>(j) * d, 0, d, ne) = block.leftCols(ne);
  }
  Mat<T> k = kernel<T>(sys);
  Mat<T> basis = Mat<T>::Zero(d, k.cols());
  basis.topRows(ne) = k;
  return find_unit<T>(a, basis, rng);
}

#define S2V_INSTANTIATE(T)                                                                                  \
  template class SuperAlgebra<T>;                                                                           \
  template struct AlgebraHom<T>;                                                                            \
  template struct UnitElement<T>;                                                                           \
  template std::vector<std::string> check_algebra<T>(const SuperAlgebra<T>&);                               \
  template AlgebraPtr<T> make_algebra<T>(SuperVectorSpace, typename SuperAlgebra<T>::Table, Vec<T>, std::string); \
  template AlgebraPtr<T> ground_field<T>();                                                                 \
  template AlgebraPtr<T> dual_numbers<T>(int);                                                              \
  template AlgebraPtr<T> split_pair<T>();                                                                   \
  template AlgebraPtr<T> endomorphism_algebra<T>(int, int);                                                 \
  template AlgebraPtr<T> clifford<T>(int, int);                                                             \
  template AlgebraPtr<T> graded_tensor<T>(const AlgebraPtr<T>&, const AlgebraPtr<T>&);                      \
  template AlgebraPtr<T> graded_opposite<T>(const AlgebraPtr<T>&);                                          \
  template AlgebraPtr<T> direct_product<T>(const AlgebraPtr<T>&, const AlgebraPtr<T>&);                     \
  template Vec<T> tensor_element<T>(const PairLayout&, const Vec<T>&, const Vec<T>&);                       \
  template AlgebraPtr<T> permute_basis<T>(const AlgebraPtr<T>&, const std::vector<int>&);                   \
  template AlgebraHom<T> identity_hom<T>(const AlgebraPtr<T>&);                                             \
  template AlgebraHom<T> compose<T>(const AlgebraHom<T>&, const AlgebraHom<T>&);                            \
  template AlgebraHom<T> inverse_hom<T>(const AlgebraHom<T>&);                                              \
  template AlgebraHom<T> parity_operator<T>(const AlgebraPtr<T>&);                                          \
  template AlgebraHom<T> tensor_hom<T>(const AlgebraHom<T>&, const AlgebraHom<T>&, const AlgebraPtr<T>&,    \
                                       const AlgebraPtr<T>&);                                               \
  template AlgebraHom<T> conjugation<T>(const UnitElement<T>&);                                             \
  template UnitElement<T> apply_hom<T>(const AlgebraHom<T>&, const UnitElement<T>&);                        \
  template Mat<T> homogeneous_basis<T>(const SuperVectorSpace&, int);                                       \
  template SearchResult<T> find_unit<T>(const AlgebraPtr<T>&, const Mat<T>&, Rng&);                         \
  template Mat<T> even_center<T>(const AlgebraPtr<T>&);                                                     \
  template Mat<T> full_center<T>(const AlgebraPtr<T>&);                                                     \
  template CentralSimpleResult<T> is_central_simple<T>(const AlgebraPtr<T>&);                               \
  template HH1Result<T> hh1<T>(const AlgebraPtr<T>&);                                                       \
  template SearchResult<T> inner_witness<T>(const AlgebraHom<T>&, Rng&);

S2V_INSTANTIATE(Rational)
S2V_INSTANTIATE(Gaussian)

}  // namespace super2vec
