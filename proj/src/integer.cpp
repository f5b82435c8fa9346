#include "super2vec/integer.hpp"

#include <stdexcept>
#include <string>

namespace super2vec {

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("IntMatrix product shape mismatch");
  IntMatrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const mpz_class& a = (*this)(i, k);
      if (a == 0) continue;
      for (int j = 0; j < o.cols_; ++j)
        if (o(k, j) != 0) r(i, j) += a * o(k, j);
    }
  return r;
}

std::vector<mpz_class> IntMatrix::apply(const std::vector<mpz_class>& v) const {
  if (static_cast<int>(v.size()) != cols_) throw std::invalid_argument("IntMatrix apply shape mismatch");
  std::vector<mpz_class> r(rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if ((*this)(i, j) != 0 && v[j] != 0) r[i] += (*this)(i, j) * v[j];
  return r;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool IntMatrix::is_zero() const {
  for (const auto& x : data_)
    if (x != 0) return false;
  return true;
}

bool IntMatrix::operator==(const IntMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

namespace {

struct SmithWork {
  IntMatrix m, u, ui, v, vi;

  // row i += c * row j
  void add_row(int i, int j, const mpz_class& c) {
    if (c == 0) return;
    for (int k = 0; k < m.cols(); ++k) m(i, k) += c * m(j, k);
    for (int k = 0; k < u.cols(); ++k) u(i, k) += c * u(j, k);
    for (int k = 0; k < ui.rows(); ++k) ui(k, j) -= c * ui(k, i);
  }
  void swap_rows(int i, int j) {
    if (i == j) return;
    for (int k = 0; k < m.cols(); ++k) std::swap(m(i, k), m(j, k));
    for (int k = 0; k < u.cols(); ++k) std::swap(u(i, k), u(j, k));
    for (int k = 0; k < ui.rows(); ++k) std::swap(ui(k, i), ui(k, j));
  }
  void negate_row(int i) {
    for (int k = 0; k < m.cols(); ++k) m(i, k) = -m(i, k);
    for (int k = 0; k < u.cols(); ++k) u(i, k) = -u(i, k);
    for (int k = 0; k < ui.rows(); ++k) ui(k, i) = -ui(k, i);
  }
  // col j += c * col i
  void add_col(int j, int i, const mpz_class& c) {
    if (c == 0) return;
    for (int k = 0; k < m.rows(); ++k) m(k, j) += c * m(k, i);
    for (int k = 0; k < v.rows(); ++k) v(k, j) += c * v(k, i);
    for (int k = 0; k < vi.cols(); ++k) vi(i, k) -= c * vi(j, k);
  }
  void swap_cols(int i, int j) {
    if (i == j) return;
    for (int k = 0; k < m.rows(); ++k) std::swap(m(k, i), m(k, j));
    for (int k = 0; k < v.rows(); ++k) std::swap(v(k, i), v(k, j));
    for (int k = 0; k < vi.cols(); ++k) std::swap(vi(i, k), vi(j, k));
  }
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& input) {
  const int r = input.rows(), c = input.cols();
  SmithWork w{input, IntMatrix::identity(r), IntMatrix::identity(r), IntMatrix::identity(c),
              IntMatrix::identity(c)};
  int t = 0;
  for (; t < std::min(r, c); ++t) {
    int pi = -1, pj = -1;
    for (int i = t; i < r; ++i)
      for (int j = t; j < c; ++j)
        if (w.m(i, j) != 0 && (pi < 0 || abs(w.m(i, j)) < abs(w.m(pi, pj)))) pi = i, pj = j;
    if (pi < 0) break;
    w.swap_rows(t, pi);
    w.swap_cols(t, pj);
    for (;;) {
      bool clean = true;
      for (int i = t + 1; i < r; ++i) {
        if (w.m(i, t) == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), w.m(i, t).get_mpz_t(), w.m(t, t).get_mpz_t());
        w.add_row(i, t, -q);
        if (w.m(i, t) != 0) clean = false;
      }
      for (int j = t + 1; j < c; ++j) {
        if (w.m(t, j) == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), w.m(t, j).get_mpz_t(), w.m(t, t).get_mpz_t());
        w.add_col(j, t, -q);
        if (w.m(t, j) != 0) clean = false;
      }
      if (!clean) {
        int bi = t, bj = t;
        for (int i = t + 1; i < r; ++i)
          if (w.m(i, t) != 0 && abs(w.m(i, t)) < abs(w.m(bi, bj))) bi = i, bj = t;
        for (int j = t + 1; j < c; ++j)
          if (w.m(t, j) != 0 && abs(w.m(t, j)) < abs(w.m(bi, bj))) bi = t, bj = j;
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        continue;
      }
      int bad = -1;
      for (int i = t + 1; i < r && bad < 0; ++i)
        for (int j = t + 1; j < c; ++j) {
          mpz_class rem;
          mpz_fdiv_r(rem.get_mpz_t(), w.m(i, j).get_mpz_t(), w.m(t, t).get_mpz_t());
          if (rem != 0) {
            bad = i;
            break;
          }
        }
      if (bad < 0) break;
      w.add_row(t, bad, 1);
    }
    if (w.m(t, t) < 0) w.negate_row(t);
  }
  SmithForm out;
  out.rank = t;
  out.d = std::move(w.m);
  out.u = std::move(w.u);
  out.u_inv = std::move(w.ui);
  out.v = std::move(w.v);
  out.v_inv = std::move(w.vi);
  return out;
}

std::optional<std::vector<mpz_class>> solve_integer(const IntMatrix& m, const std::vector<mpz_class>& b) {
  if (static_cast<int>(b.size()) != m.rows()) throw std::invalid_argument("solve_integer shape mismatch");
  SmithForm s = smith_normal_form(m);
  std::vector<mpz_class> ub = s.u.apply(b);
  std::vector<mpz_class> y(m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    if (i < s.rank) {
      if (!mpz_divisible_p(ub[i].get_mpz_t(), s.d(i, i).get_mpz_t())) return std::nullopt;
      y[i] = ub[i] / s.d(i, i);
    } else if (ub[i] != 0) {
      return std::nullopt;
    }
  }
  return s.v.apply(y);
}

void IntegerChainComplex::validate() const {
  if (delta.size() + 1 != ranks.size() && !(ranks.empty() && delta.empty()))
    throw std::invalid_argument("chain complex: rank list does not match differentials");
  for (size_t n = 0; n < delta.size(); ++n) {
    if (delta[n].cols() != ranks[n] || delta[n].rows() != ranks[n + 1])
      throw std::invalid_argument("chain complex: differential " + std::to_string(n) + " has wrong shape");
    if (n + 1 < delta.size() && !(delta[n + 1] * delta[n]).is_zero())
      throw std::invalid_argument("chain complex: d o d != 0 at degree " + std::to_string(n));
  }
}

namespace {

mpz_class reduce_mod(const mpz_class& x, const mpz_class& m) {
  if (m == 0) return x;
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

}  // namespace

bool ClassResult::is_zero() const {
  if (!is_cocycle) return false;
  for (const auto& c : coordinates)
    if (c != 0) return false;
  return true;
}

bool CohomologyGroup::is_cocycle(const std::vector<mpz_class>& cochain) const {
  if (static_cast<int>(cochain.size()) != next_delta.cols())
    throw std::invalid_argument("cochain has wrong length for degree " + std::to_string(degree));
  for (const auto& x : next_delta.apply(cochain))
    if (reduce_mod(x, modulus) != 0) return false;
  return true;
}

ClassResult CohomologyGroup::classify(const std::vector<mpz_class>& cochain) const {
  ClassResult res;
  if (!is_cocycle(cochain)) return res;
  res.is_cocycle = true;
  std::vector<mpz_class> w = v_inv.apply(cochain);
  std::vector<mpz_class> coords(kernel_index.size());
  for (size_t k = 0; k < kernel_index.size(); ++k) coords[k] = w[kernel_index[k]] / kernel_scale[k];
  std::vector<mpz_class> y = u_relations.apply(coords);
  for (size_t f = 0; f < factor_rows.size(); ++f) res.coordinates.push_back(reduce_mod(y[factor_rows[f]], orders[f]));
  return res;
}

CohomologyGroup cohomology(const IntegerChainComplex& c, int modulus, int degree) {
  if (degree < 0 || degree >= static_cast<int>(c.ranks.size()))
    throw std::invalid_argument("cohomology: degree " + std::to_string(degree) + " not present");
  if (modulus < 0) throw std::invalid_argument("cohomology: negative modulus");
  const int n = c.ranks[degree];
  CohomologyGroup g;
  g.degree = degree;
  g.modulus = modulus;
  g.next_delta = degree < static_cast<int>(c.delta.size()) ? c.delta[degree] : IntMatrix(0, n);
  IntMatrix prev = degree > 0 ? c.delta[degree - 1] : IntMatrix(n, 0);

  SmithForm s = smith_normal_form(g.next_delta);
  g.v_inv = s.v_inv;
  mpz_class m(modulus);
  for (int i = 0; i < n; ++i) {
    mpz_class scale;
    if (i < s.rank) {
      if (modulus == 0) continue;
      mpz_class gg;
      mpz_gcd(gg.get_mpz_t(), s.d(i, i).get_mpz_t(), m.get_mpz_t());
      scale = m / gg;
    } else {
      scale = 1;
    }
    g.kernel_index.push_back(i);
    g.kernel_scale.push_back(scale);
    std::vector<mpz_class> col(n);
    for (int r = 0; r < n; ++r) col[r] = s.v(r, i) * scale;
    g.kernel_columns.push_back(std::move(col));
  }
  const int k = static_cast<int>(g.kernel_index.size());

  auto coords_of = [&](const std::vector<mpz_class>& v) {
    std::vector<mpz_class> w = s.v_inv.apply(v);
    std::vector<mpz_class> out(k);
    for (int j = 0; j < k; ++j) out[j] = w[g.kernel_index[j]] / g.kernel_scale[j];
    return out;
  };
  int gens = prev.cols() + (modulus ? n : 0);
  IntMatrix rel(k, gens);
  for (int j = 0; j < prev.cols(); ++j) {
    std::vector<mpz_class> col(n);
    for (int r = 0; r < n; ++r) col[r] = prev(r, j);
    auto co = coords_of(col);
    for (int i = 0; i < k; ++i) rel(i, j) = co[i];
  }
  if (modulus)
    for (int j = 0; j < n; ++j) {
      std::vector<mpz_class> col(n);
      col[j] = m;
      auto co = coords_of(col);
      for (int i = 0; i < k; ++i) rel(i, prev.cols() + j) = co[i];
    }
  SmithForm sr = smith_normal_form(rel);
  g.u_relations = sr.u;
  for (int j = 0; j < k; ++j) {
    mpz_class d = j < sr.rank ? sr.d(j, j) : mpz_class(0);
    if (d == 1) continue;
    g.factor_rows.push_back(j);
    g.orders.push_back(d);
    std::vector<mpz_class> gen(n);
    for (int i = 0; i < k; ++i) {
      const mpz_class& coef = sr.u_inv(i, j);
      if (coef == 0) continue;
      for (int r = 0; r < n; ++r) gen[r] += coef * g.kernel_columns[i][r];
    }
    if (modulus)
      for (auto& x : gen) x = reduce_mod(x, m);
    g.generators.push_back(std::move(gen));
  }
  return g;
}

}  // namespace super2vec
