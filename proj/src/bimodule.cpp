#include "super2vec/bimodule.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace super2vec {

template <class T>
Mat<T> SuperBimodule<T>::act_left(const Vec<T>& a) const {
  Mat<T> m = Mat<T>::Zero(dim(), dim());
  for (Index i = 0; i < a.size(); ++i)
    if (!is_zero(a(i))) m += a(i) * left[i];
  return m;
}

template <class T>
Mat<T> SuperBimodule<T>::act_right(const Vec<T>& b) const {
  Mat<T> m = Mat<T>::Zero(dim(), dim());
  for (Index i = 0; i < b.size(); ++i)
    if (!is_zero(b(i))) m += b(i) * right[i];
  return m;
}

namespace {

template <class T>
Mat<T> act_sparse(const std::vector<Mat<T>>& ops, const SparseRow<T>& coeffs, int n) {
  Mat<T> m = Mat<T>::Zero(n, n);
  for (const auto& [k, c] : coeffs) m += c * ops[k];
  return m;
}

template <class T>
Vec<T> vectorize(const Mat<T>& m) {
  return Eigen::Map<const Vec<T>>(m.data(), m.size());
}

template <class T>
Mat<T> unvectorize(const Vec<T>& v, Index rows, Index cols) {
  return Eigen::Map<const Mat<T>>(v.data(), rows, cols);
}

}  // namespace

template <class T>
std::vector<std::string> check_bimodule(const SuperBimodule<T>& m) {
  std::vector<std::string> out;
  const auto& a = m.left_algebra;
  const auto& b = m.right_algebra;
  const int n = m.dim();
  if (!a || !b) return {"missing algebra"};
  if (static_cast<int>(m.left.size()) != a->dim()) out.push_back("left action count differs from dim A");
  if (static_cast<int>(m.right.size()) != b->dim()) out.push_back("right action count differs from dim B");
  if (static_cast<int>(m.carrier.labels.size()) != n) out.push_back("label count differs from dimension");
  if (!out.empty()) return out;
  for (const auto* ops : {&m.left, &m.right})
    for (const auto& x : *ops)
      if (x.rows() != n || x.cols() != n) return {"action matrix has wrong shape"};
  for (int i = 0; i < a->dim(); ++i)
    if (!has_parity<T>(m.carrier, m.carrier, m.left[i], a->parity(i)))
      out.push_back("left action of basis " + std::to_string(i) + " violates parity");
  for (int j = 0; j < b->dim(); ++j)
    if (!has_parity<T>(m.carrier, m.carrier, m.right[j], b->parity(j)))
      out.push_back("right action of basis " + std::to_string(j) + " violates parity");
  if (m.act_left(a->unit()) != identity<T>(n)) out.push_back("left unit does not act as identity");
  if (m.act_right(b->unit()) != identity<T>(n)) out.push_back("right unit does not act as identity");
  for (int i = 0; i < a->dim(); ++i)
    for (int j = 0; j < a->dim(); ++j)
      if (mul<T>(m.left[i], m.left[j]) != act_sparse<T>(m.left, a->product(i, j), n)) {
        out.push_back("left action not associative at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        return out;
      }
  for (int i = 0; i < b->dim(); ++i)
    for (int j = 0; j < b->dim(); ++j)
      if (mul<T>(m.right[j], m.right[i]) != act_sparse<T>(m.right, b->product(i, j), n)) {
        out.push_back("right action not associative at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        return out;
      }
  for (int i = 0; i < a->dim(); ++i)
    for (int j = 0; j < b->dim(); ++j)
      if (mul<T>(m.left[i], m.right[j]) != mul<T>(m.right[j], m.left[i])) {
        out.push_back("actions do not commute at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        return out;
      }
  return out;
}

template <class T>
BimodulePtr<T> make_bimodule(SuperBimodule<T> m) {
  auto errs = check_bimodule(m);
  if (!errs.empty()) throw std::invalid_argument("invalid bimodule: " + errs.front());
  return std::make_shared<SuperBimodule<T>>(std::move(m));
}

template <class T>
BimodulePtr<T> regular_bimodule(const AlgebraPtr<T>& a) {
  SuperBimodule<T> m{a, a, a->carrier(), {}, {}, a->name()};
  for (int i = 0; i < a->dim(); ++i) {
    m.left.push_back(a->left_basis(i));
    m.right.push_back(a->right_basis(i));
  }
  return std::make_shared<SuperBimodule<T>>(std::move(m));
}

template <class T>
BimodulePtr<T> twisted_regular(const AlgebraHom<T>& phi) {
  const auto& b = phi.target;
  SuperBimodule<T> m{b, phi.source, b->carrier(), {}, {}, b->name() + "_phi"};
  for (int i = 0; i < b->dim(); ++i) m.left.push_back(b->left_basis(i));
  for (int j = 0; j < phi.source->dim(); ++j) m.right.push_back(b->right_mult(phi.map.col(j)));
  return std::make_shared<SuperBimodule<T>>(std::move(m));
}

template <class T>
BimodulePtr<T> line(const AlgebraPtr<T>& k, int parity) {
  if (k->dim() != 1) throw std::invalid_argument("line: algebra is not the ground field");
  SuperVectorSpace s = parity ? SuperVectorSpace(0, 1, {"l"}) : SuperVectorSpace(1, 0, {"l"});
  SuperBimodule<T> m{k, k, s, {identity<T>(1)}, {identity<T>(1)}, parity ? "k^{0|1}" : "k^{1|0}"};
  return std::make_shared<SuperBimodule<T>>(std::move(m));
}

template <class T>
BimodulePtr<T> direct_sum(const BimodulePtr<T>& m, const BimodulePtr<T>& n) {
  if (!same_algebra(m->left_algebra, n->left_algebra) || !same_algebra(m->right_algebra, n->right_algebra))
    throw std::invalid_argument("direct_sum: bimodules over different algebras");
  const auto& a = m->carrier;
  const auto& b = n->carrier;
  // Position of each summand basis vector in the evens-first sum.
  std::vector<int> pa(a.dim()), pb(b.dim());
  std::vector<std::string> labels(a.dim() + b.dim());
  for (int i = 0; i < a.dim(); ++i) pa[i] = a.parity(i) ? a.even + b.even + (i - a.even) : i;
  for (int i = 0; i < b.dim(); ++i) pb[i] = b.parity(i) ? a.dim() + b.even + (i - b.even) : a.even + i;
  for (int i = 0; i < a.dim(); ++i) labels[pa[i]] = a.labels[i] + "+0";
  for (int i = 0; i < b.dim(); ++i) labels[pb[i]] = "0+" + b.labels[i];
  const int d = a.dim() + b.dim();
  auto place = [&](const Mat<T>& x, const Mat<T>& y) {
    Mat<T> z = Mat<T>::Zero(d, d);
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j < a.dim(); ++j) z(pa[i], pa[j]) = x(i, j);
    for (int i = 0; i < b.dim(); ++i)
      for (int j = 0; j < b.dim(); ++j) z(pb[i], pb[j]) = y(i, j);
    return z;
  };
  SuperBimodule<T> r{m->left_algebra, m->right_algebra, SuperVectorSpace(a.even + b.even, a.odd + b.odd, labels),
                     {}, {}, m->name + "+" + n->name};
  for (size_t i = 0; i < m->left.size(); ++i) r.left.push_back(place(m->left[i], n->left[i]));
  for (size_t j = 0; j < m->right.size(); ++j) r.right.push_back(place(m->right[j], n->right[j]));
  return std::make_shared<SuperBimodule<T>>(std::move(r));
}

template <class T>
Mat<T> flip_map(const SuperVectorSpace& s) {
  const int n = s.dim();
  Mat<T> q = Mat<T>::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    int old = k < s.odd ? s.even + k : k - s.odd;
    q(old, k) = T(1);
  }
  return q;
}

template <class T>
BimodulePtr<T> parity_flip(const BimodulePtr<T>& m) {
  const auto& s = m->carrier;
  Mat<T> q = flip_map<T>(s);
  Mat<T> qt = q.transpose();
  std::vector<std::string> labels;
  for (int k = 0; k < s.dim(); ++k) labels.push_back(s.labels[k < s.odd ? s.even + k : k - s.odd]);
  SuperBimodule<T> r{m->left_algebra, m->right_algebra, SuperVectorSpace(s.odd, s.even, labels), {}, {},
                     "Pi(" + m->name + ")"};
  for (const auto& x : m->left) r.left.push_back(mul<T>(qt, mul<T>(x, q)));
  for (int j = 0; j < m->right_algebra->dim(); ++j) {
    Mat<T> x = mul<T>(qt, mul<T>(m->right[j], q));
    r.right.push_back(m->right_algebra->parity(j) ? Mat<T>(-x) : x);
  }
  return std::make_shared<SuperBimodule<T>>(std::move(r));
}

template <class T>
BimodulePtr<T> twist(const BimodulePtr<T>& m, const AlgebraHom<T>& phi, const AlgebraHom<T>& psi) {
  if (!same_algebra(phi.target, m->left_algebra)) throw std::invalid_argument("twist: left homomorphism target mismatch");
  if (!same_algebra(psi.target, m->right_algebra))
    throw std::invalid_argument("twist: right homomorphism target mismatch");
  SuperBimodule<T> r{phi.source, psi.source, m->carrier, {}, {}, m->name + "_tw"};
  for (int i = 0; i < phi.source->dim(); ++i) r.left.push_back(m->act_left(phi.map.col(i)));
  for (int j = 0; j < psi.source->dim(); ++j) r.right.push_back(m->act_right(psi.map.col(j)));
  return std::make_shared<SuperBimodule<T>>(std::move(r));
}

template <class T>
Vec<T> RelTensor<T>::pure(const Vec<T>& x, const Vec<T>& y) const {
  Vec<T> r = Vec<T>::Zero(projection.rows());
  for (Index i = 0; i < x.size(); ++i) {
    if (is_zero(x(i))) continue;
    for (Index j = 0; j < y.size(); ++j)
      if (!is_zero(y(j))) r += (x(i) * y(j)) * projection.col(layout.at(static_cast<int>(i), static_cast<int>(j)));
  }
  return r;
}

template <class T>
RelTensor<T> rel_tensor(const BimodulePtr<T>& m, const BimodulePtr<T>& n) {
  if (!same_algebra(m->right_algebra, n->left_algebra))
    throw std::invalid_argument("rel_tensor: middle algebras differ");
  RelTensor<T> r;
  r.first = m;
  r.second = n;
  r.layout = PairLayout(m->carrier, n->carrier);
  const auto& lay = r.layout;
  const Index d = static_cast<Index>(lay.pairs.size());
  const auto& b = m->right_algebra;
  RowEchelon<T> ech(d);
  for (int j = 0; j < b->dim(); ++j) {
    const Mat<T>& rm = m->right[j];
    const Mat<T>& ln = n->left[j];
    for (int i = 0; i < m->dim(); ++i)
      for (int k = 0; k < n->dim(); ++k) {
        SparseRow<T> row;
        for (int s = 0; s < m->dim(); ++s)
          if (!is_zero(rm(s, i))) row.emplace_back(lay.at(s, k), rm(s, i));
        for (int s = 0; s < n->dim(); ++s)
          if (!is_zero(ln(s, k))) row.emplace_back(lay.at(i, s), -ln(s, k));
        if (!row.empty()) ech.add_row(row);
      }
  }
  r.free = ech.free_columns();
  const Index q = static_cast<Index>(r.free.size());
  std::vector<Index> slot(d, -1);
  for (Index t = 0; t < q; ++t) slot[r.free[t]] = t;
  r.projection = Mat<T>::Zero(q, d);
  for (Index c = 0; c < d; ++c)
    for (const auto& [col, v] : ech.reduce({{c, T(1)}})) r.projection(slot[col], c) = v;

  int evens = 0;
  std::vector<std::string> labels;
  for (Index f : r.free) {
    labels.push_back(lay.space.labels[f]);
    if (!lay.space.parity(f)) ++evens;
  }
  SuperBimodule<T> out{m->left_algebra, n->right_algebra,
                       SuperVectorSpace(evens, static_cast<int>(q) - evens, labels), {}, {},
                       m->name + "(x)" + n->name};
  // Induced action on pair c = (x, y) for an operator acting on one factor.
  auto lift_left = [&](const Mat<T>& op, int x, int y) {
    Vec<T> v = Vec<T>::Zero(q);
    for (int s = 0; s < m->dim(); ++s)
      if (!is_zero(op(s, x))) v += op(s, x) * r.projection.col(lay.at(s, y));
    return v;
  };
  auto lift_right = [&](const Mat<T>& op, int x, int y) {
    Vec<T> v = Vec<T>::Zero(q);
    for (int s = 0; s < n->dim(); ++s)
      if (!is_zero(op(s, y))) v += op(s, y) * r.projection.col(lay.at(x, s));
    return v;
  };
  auto induce = [&](const Mat<T>& op, bool on_left) {
    Mat<T> ind(q, q);
    for (Index t = 0; t < q; ++t) {
      auto [x, y] = lay.pairs[r.free[t]];
      ind.col(t) = on_left ? lift_left(op, x, y) : lift_right(op, x, y);
    }
    for (Index c = 0; c < d; ++c) {
      auto [x, y] = lay.pairs[c];
      Vec<T> direct = on_left ? lift_left(op, x, y) : lift_right(op, x, y);
      if (direct != mul<T>(ind, Vec<T>(r.projection.col(c))))
        throw std::logic_error("rel_tensor: induced action is not well defined");
    }
    return ind;
  };
  for (const auto& op : m->left) out.left.push_back(induce(op, true));
  for (const auto& op : n->right) out.right.push_back(induce(op, false));
  r.module = std::make_shared<SuperBimodule<T>>(std::move(out));
  return r;
}

template <class T>
Mat<T> pair_map(const PairLayout& src, const PairLayout& tgt, const SuperVectorSpace& left_src, const Mat<T>& f,
                const Mat<T>& g, int g_parity) {
  const Index ds = static_cast<Index>(src.pairs.size());
  Mat<T> out = Mat<T>::Zero(static_cast<Index>(tgt.pairs.size()), ds);
  for (Index x = 0; x < ds; ++x) {
    auto [i, j] = src.pairs[x];
    bool neg = g_parity && left_src.parity(i);
    for (Index r = 0; r < f.rows(); ++r) {
      if (is_zero(f(r, i))) continue;
      for (Index s = 0; s < g.rows(); ++s)
        if (!is_zero(g(s, j))) {
          T c = f(r, i) * g(s, j);
          out(tgt.at(static_cast<int>(r), static_cast<int>(s)), x) = neg ? -c : c;
        }
    }
  }
  return out;
}

template <class T>
BimodulePtr<T> external_tensor(const BimodulePtr<T>& m, const BimodulePtr<T>& m2, AlgebraPtr<T> left,
                               AlgebraPtr<T> right) {
  if (!left) left = graded_tensor(m->left_algebra, m2->left_algebra);
  if (!right) right = graded_tensor(m->right_algebra, m2->right_algebra);
  PairLayout lay(m->carrier, m2->carrier);
  PairLayout la(m->left_algebra->carrier(), m2->left_algebra->carrier());
  PairLayout lb(m->right_algebra->carrier(), m2->right_algebra->carrier());
  if (left->dim() != static_cast<int>(la.pairs.size()) || right->dim() != static_cast<int>(lb.pairs.size()))
    throw std::invalid_argument("external_tensor: algebra dimensions do not match");
  SuperBimodule<T> out{left, right, lay.space, {}, {}, m->name + "#" + m2->name};
  for (const auto& [i, j] : la.pairs)
    out.left.push_back(pair_map<T>(lay, lay, m->carrier, m->left[i], m2->left[j], m2->left_algebra->parity(j)));
  // (m (x) m') . (b (x) b') = (-1)^{|b||m'|} (m b) (x) (m' b')
  for (const auto& [i, j] : lb.pairs) {
    Mat<T> x = pair_map<T>(lay, lay, m->carrier, m->right[i], m2->right[j], 0);
    if (m->right_algebra->parity(i))
      for (Index c = 0; c < x.cols(); ++c)
        if (m2->carrier.parity(lay.pairs[c].second)) x.col(c) = -x.col(c);
    out.right.push_back(x);
  }
  return std::make_shared<SuperBimodule<T>>(std::move(out));
}

template <class T>
std::vector<std::string> check_intertwiner(const Intertwiner<T>& f) {
  const auto& s = f.source;
  const auto& t = f.target;
  if (!same_algebra(s->left_algebra, t->left_algebra) || !same_algebra(s->right_algebra, t->right_algebra))
    return {"source and target have different algebras"};
  if (f.map.rows() != t->dim() || f.map.cols() != s->dim()) return {"map has wrong shape"};
  std::vector<std::string> out;
  if (!has_parity<T>(s->carrier, t->carrier, f.map, 0)) out.push_back("map is not even");
  for (size_t i = 0; i < s->left.size(); ++i)
    if (mul<T>(f.map, s->left[i]) != mul<T>(t->left[i], f.map))
      out.push_back("fails to commute with left basis " + std::to_string(i));
  for (size_t j = 0; j < s->right.size(); ++j)
    if (mul<T>(f.map, s->right[j]) != mul<T>(t->right[j], f.map))
      out.push_back("fails to commute with right basis " + std::to_string(j));
  return out;
}

template <class T>
Intertwiner<T> identity_intertwiner(const BimodulePtr<T>& m) {
  return {m, m, identity<T>(m->dim())};
}

template <class T>
Intertwiner<T> compose(const Intertwiner<T>& f, const Intertwiner<T>& g) {
  if (f.source->dim() != g.target->dim()) throw std::invalid_argument("compose: dimension mismatch");
  return {g.source, f.target, mul<T>(f.map, g.map)};
}

template <class T>
std::optional<Intertwiner<T>> invert(const Intertwiner<T>& f) {
  if (f.map.rows() != f.map.cols()) return std::nullopt;
  auto inv = inverse<T>(f.map);
  if (!inv) return std::nullopt;
  return Intertwiner<T>{f.target, f.source, *inv};
}

template <class T>
Intertwiner<T> tensor_intertwiners(const Intertwiner<T>& f, const Intertwiner<T>& g, const RelTensor<T>& src,
                                   const RelTensor<T>& tgt) {
  const Index q = src.module->dim();
  Mat<T> m(tgt.module->dim(), q);
  for (Index t = 0; t < q; ++t) {
    auto [i, j] = src.representative(static_cast<int>(t));
    m.col(t) = tgt.pure(f.map.col(i), g.map.col(j));
  }
  return {src.module, tgt.module, m};
}

template <class T>
std::vector<Mat<T>> equivariant_maps(const std::vector<Mat<T>>& s, const std::vector<Mat<T>>& t,
                                     const SuperVectorSpace& src, const SuperVectorSpace& tgt, int parity) {
  if (s.size() != t.size()) throw std::invalid_argument("equivariant_maps: operator counts differ");
  const int n = src.dim(), m = tgt.dim();
  std::vector<Index> var(static_cast<size_t>(m) * n, -1);
  std::vector<std::pair<int, int>> cells;
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < m; ++r)
      if (tgt.parity(r) == ((src.parity(c) + parity) & 1)) {
        var[static_cast<size_t>(c) * m + r] = static_cast<Index>(cells.size());
        cells.emplace_back(r, c);
      }
  const Index nv = static_cast<Index>(cells.size());
  std::vector<Mat<T>> out;
  if (nv == 0) return out;
  RowEchelon<T> ech(nv);
  for (size_t k = 0; k < s.size(); ++k) {
    const Mat<T>& sk = s[k];
    const Mat<T>& tk = t[k];
    // Column nonzeros of sk and row nonzeros of tk.
    std::vector<std::vector<std::pair<int, T>>> scol(n), trow(m);
    for (int c = 0; c < n; ++c)
      for (int j = 0; j < n; ++j)
        if (!is_zero(sk(j, c))) scol[c].emplace_back(j, sk(j, c));
    for (int r = 0; r < m; ++r)
      for (int j = 0; j < m; ++j)
        if (!is_zero(tk(r, j))) trow[r].emplace_back(j, tk(r, j));
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < m; ++r) {
        std::map<Index, T> acc;
        for (const auto& [j, v] : scol[c]) {
          Index x = var[static_cast<size_t>(j) * m + r];
          if (x >= 0) acc[x] += v;
        }
        for (const auto& [j, v] : trow[r]) {
          Index x = var[static_cast<size_t>(c) * m + j];
          if (x >= 0) acc[x] -= v;
        }
        SparseRow<T> row;
        for (auto& [x, v] : acc)
          if (!is_zero(v)) row.emplace_back(x, v);
        if (!row.empty()) ech.add_row(row);
      }
  }
  Mat<T> k = ech.kernel();
  for (Index col = 0; col < k.cols(); ++col) {
    Mat<T> x = Mat<T>::Zero(m, n);
    for (Index v = 0; v < nv; ++v) x(cells[v].first, cells[v].second) = k(v, col);
    out.push_back(x);
  }
  return out;
}

template <class T>
std::vector<Mat<T>> intertwiner_space(const BimodulePtr<T>& m, const BimodulePtr<T>& n) {
  if (!same_algebra(m->left_algebra, n->left_algebra) || !same_algebra(m->right_algebra, n->right_algebra))
    throw std::invalid_argument("intertwiner_space: bimodules over different algebras");
  std::vector<Mat<T>> s = m->left, t = n->left;
  s.insert(s.end(), m->right.begin(), m->right.end());
  t.insert(t.end(), n->right.begin(), n->right.end());
  return equivariant_maps<T>(s, t, m->carrier, n->carrier, 0);
}

template <class T>
MatrixSearch<T> find_invertible(const std::vector<Mat<T>>& basis, Rng& rng) {
  MatrixSearch<T> res;
  if (basis.empty()) {
    res.status = SearchStatus::ZeroSpace;
    return res;
  }
  if (basis[0].rows() != basis[0].cols()) return res;
  auto attempt = [&](const Mat<T>& x) {
    if (inverse<T>(x)) {
      res.status = SearchStatus::Found;
      res.matrix = x;
      return true;
    }
    return false;
  };
  const int k = static_cast<int>(basis.size());
  const int r = std::min(k, 5);
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
    Mat<T> x = Mat<T>::Zero(basis[0].rows(), basis[0].cols());
    for (int i = 0; i < r; ++i)
      if (c[i]) x += c[i] > 0 ? basis[i] : Mat<T>(-basis[i]);
    if (attempt(x)) return res;
  }
  for (int s = 0; s < 64; ++s) {
    Mat<T> x = Mat<T>::Zero(basis[0].rows(), basis[0].cols());
    for (int i = 0; i < k; ++i) x += Field<T>::sample(rng) * basis[i];
    if (attempt(x)) return res;
  }
  return res;
}

template <class T>
IsoSearch<T> find_isomorphism(const BimodulePtr<T>& m, const BimodulePtr<T>& n, Rng& rng) {
  IsoSearch<T> res;
  auto space = intertwiner_space(m, n);
  if (space.empty()) {
    res.status = SearchStatus::ZeroSpace;
    return res;
  }
  if (!(m->carrier == n->carrier)) return res;
  auto found = find_invertible(space, rng);
  res.status = found.status;
  if (found.matrix) res.iso = Intertwiner<T>{m, n, *found.matrix};
  return res;
}

template <class T>
std::optional<InvertibilityCertificate<T>> certify_invertible(const BimodulePtr<T>& m) {
  const auto& a = m->left_algebra;
  const auto& b = m->right_algebra;
  const int dm = m->dim(), db = b->dim();
  std::vector<Mat<T>> rb;
  for (int j = 0; j < db; ++j) rb.push_back(b->right_basis(j));
  std::vector<Mat<T>> xi = equivariant_maps<T>(m->right, rb, m->carrier, b->carrier(), 0);
  const int evens = static_cast<int>(xi.size());
  auto odd = equivariant_maps<T>(m->right, rb, m->carrier, b->carrier(), 1);
  xi.insert(xi.end(), odd.begin(), odd.end());
  const int nl = static_cast<int>(xi.size());
  if (nl == 0) return std::nullopt;

  Mat<T> stacked(static_cast<Index>(db) * dm, nl);
  for (int i = 0; i < nl; ++i) stacked.col(i) = vectorize<T>(xi[i]);
  Coordinates<T> coords(stacked);
  std::vector<std::string> labels;
  for (int i = 0; i < nl; ++i) labels.push_back("xi" + std::to_string(i));
  SuperBimodule<T> inv{b, a, SuperVectorSpace(evens, nl - evens, labels), {}, {}, "Hom(" + m->name + ",B)"};
  for (int j = 0; j < db; ++j) {
    Mat<T> op(nl, nl);
    Mat<T> lb = b->left_basis(j);
    for (int i = 0; i < nl; ++i) op.col(i) = coords.of_unchecked(vectorize<T>(mul<T>(lb, xi[i])));
    inv.left.push_back(op);
  }
  for (int k = 0; k < a->dim(); ++k) {
    Mat<T> op(nl, nl);
    for (int i = 0; i < nl; ++i) op.col(i) = coords.of_unchecked(vectorize<T>(mul<T>(xi[i], m->left[k])));
    inv.right.push_back(op);
  }
  auto n = std::make_shared<SuperBimodule<T>>(std::move(inv));

  InvertibilityCertificate<T> cert;
  cert.inverse = n;
  cert.inner = rel_tensor<T>(n, m);
  const Index qi = cert.inner.module->dim();
  Mat<T> ev(db, qi);
  for (Index t = 0; t < qi; ++t) {
    auto [i, j] = cert.inner.representative(static_cast<int>(t));
    ev.col(t) = xi[i].col(j);
  }
  if (qi != db) return std::nullopt;
  auto ev_inv = inverse<T>(ev);
  if (!ev_inv) return std::nullopt;

  cert.outer = rel_tensor<T>(m, n);
  const Index qo = cert.outer.module->dim();
  if (qo != a->dim()) return std::nullopt;
  Mat<T> theta(static_cast<Index>(dm) * dm, qo);
  for (Index t = 0; t < qo; ++t) {
    auto [i, j] = cert.outer.representative(static_cast<int>(t));
    Mat<T> e(dm, dm);
    for (int k = 0; k < dm; ++k) e.col(k) = m->act_right(xi[j].col(k)).col(i);
    theta.col(t) = vectorize<T>(e);
  }
  Mat<T> alpha(static_cast<Index>(dm) * dm, a->dim());
  for (int k = 0; k < a->dim(); ++k) alpha.col(k) = vectorize<T>(m->left[k]);
  auto coev = solve_matrix<T>(theta, alpha);
  if (!coev) return std::nullopt;
  auto coev_inv = inverse<T>(*coev);
  if (!coev_inv) return std::nullopt;

  auto rb_mod = regular_bimodule(b);
  auto ra_mod = regular_bimodule(a);
  cert.evaluation = {cert.inner.module, rb_mod, ev};
  cert.evaluation_inverse = {rb_mod, cert.inner.module, *ev_inv};
  cert.coevaluation = {ra_mod, cert.outer.module, *coev};
  cert.coevaluation_inverse = {cert.outer.module, ra_mod, *coev_inv};
  return cert;
}

template <class T>
std::vector<std::string> check_certificate(const InvertibilityCertificate<T>& c) {
  std::vector<std::string> out;
  auto add = [&](const std::string& what, const std::vector<std::string>& errs) {
    for (const auto& e : errs) out.push_back(what + ": " + e);
  };
  add("inverse", check_bimodule(*c.inverse));
  add("evaluation", check_intertwiner(c.evaluation));
  add("evaluation inverse", check_intertwiner(c.evaluation_inverse));
  add("coevaluation", check_intertwiner(c.coevaluation));
  add("coevaluation inverse", check_intertwiner(c.coevaluation_inverse));
  if (!out.empty()) return out;
  if (compose(c.evaluation, c.evaluation_inverse).map != identity<T>(c.evaluation.target->dim()) ||
      compose(c.evaluation_inverse, c.evaluation).map != identity<T>(c.evaluation.source->dim()))
    out.push_back("evaluation composites are not identities");
  if (compose(c.coevaluation, c.coevaluation_inverse).map != identity<T>(c.coevaluation.target->dim()) ||
      compose(c.coevaluation_inverse, c.coevaluation).map != identity<T>(c.coevaluation.source->dim()))
    out.push_back("coevaluation composites are not identities");
  return out;
}

#define S2V_INSTANTIATE(T)                                                                                   \
  template struct SuperBimodule<T>;                                                                          \
  template struct RelTensor<T>;                                                                              \
  template std::vector<std::string> check_bimodule<T>(const SuperBimodule<T>&);                              \
  template BimodulePtr<T> make_bimodule<T>(SuperBimodule<T>);                                                \
  template BimodulePtr<T> regular_bimodule<T>(const AlgebraPtr<T>&);                                         \
  template BimodulePtr<T> twisted_regular<T>(const AlgebraHom<T>&);                                          \
  template BimodulePtr<T> line<T>(const AlgebraPtr<T>&, int);                                                \
  template BimodulePtr<T> direct_sum<T>(const BimodulePtr<T>&, const BimodulePtr<T>&);                      \
  template BimodulePtr<T> parity_flip<T>(const BimodulePtr<T>&);                                             \
  template Mat<T> flip_map<T>(const SuperVectorSpace&);                                                      \
  template BimodulePtr<T> twist<T>(const BimodulePtr<T>&, const AlgebraHom<T>&, const AlgebraHom<T>&);       \
  template RelTensor<T> rel_tensor<T>(const BimodulePtr<T>&, const BimodulePtr<T>&);                         \
  template BimodulePtr<T> external_tensor<T>(const BimodulePtr<T>&, const BimodulePtr<T>&, AlgebraPtr<T>,    \
                                             AlgebraPtr<T>);                                                 \
  template std::vector<std::string> check_intertwiner<T>(const Intertwiner<T>&);                             \
  template Intertwiner<T> identity_intertwiner<T>(const BimodulePtr<T>&);                                    \
  template Intertwiner<T> compose<T>(const Intertwiner<T>&, const Intertwiner<T>&);                          \
  template std::optional<Intertwiner<T>> invert<T>(const Intertwiner<T>&);                                  \
  template Intertwiner<T> tensor_intertwiners<T>(const Intertwiner<T>&, const Intertwiner<T>&,               \
                                                 const RelTensor<T>&, const RelTensor<T>&);                  \
  template Mat<T> pair_map<T>(const PairLayout&, const PairLayout&, const SuperVectorSpace&, const Mat<T>&,  \
                              const Mat<T>&, int);                                                           \
  template std::vector<Mat<T>> intertwiner_space<T>(const BimodulePtr<T>&, const BimodulePtr<T>&);          \
  template std::vector<Mat<T>> equivariant_maps<T>(const std::vector<Mat<T>>&, const std::vector<Mat<T>>&,   \
                                                   const SuperVectorSpace&, const SuperVectorSpace&, int);   \
  template MatrixSearch<T> find_invertible<T>(const std::vector<Mat<T>>&, Rng&);                             \
  template IsoSearch<T> find_isomorphism<T>(const BimodulePtr<T>&, const BimodulePtr<T>&, Rng&);             \
  template std::optional<InvertibilityCertificate<T>> certify_invertible<T>(const BimodulePtr<T>&);          \
  template std::vector<std::string> check_certificate<T>(const InvertibilityCertificate<T>&);

S2V_INSTANTIATE(Rational)
S2V_INSTANTIATE(Gaussian)

}  // namespace super2vec
