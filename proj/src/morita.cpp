#include "super2vec/morita.hpp"

#include <stdexcept>
#include <type_traits>

namespace super2vec {

namespace {

template <class T>
using Poly = std::vector<T>;  // lowest degree first

template <class T>
void trim(Poly<T>& p) {
  while (!p.empty() && is_zero(p.back())) p.pop_back();
}

template <class T>
Poly<T> poly_mul(const Poly<T>& a, const Poly<T>& b) {
  if (a.empty() || b.empty()) return {};
  Poly<T> r(a.size() + b.size() - 1, T(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

template <class T>
Poly<T> poly_sub(Poly<T> a, const Poly<T>& b) {
  if (a.size() < b.size()) a.resize(b.size(), T(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim(a);
  return a;
}

template <class T>
std::pair<Poly<T>, Poly<T>> poly_divmod(Poly<T> a, const Poly<T>& b) {
  trim(a);
  if (a.size() < b.size()) return {{}, a};
  Poly<T> q(a.size() - b.size() + 1, T(0));
  for (size_t k = q.size(); k-- > 0;) {
    T c = a[k + b.size() - 1] / b.back();
    q[k] = c;
    for (size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
  }
  trim(a);
  trim(q);
  return {q, a};
}

template <class T>
T poly_eval(const Poly<T>& p, const T& x) {
  T r(0);
  for (size_t k = p.size(); k-- > 0;) r = r * x + p[k];
  return r;
}

// u with u*a = 1 mod b, for coprime a and b.
template <class T>
Poly<T> inverse_mod(const Poly<T>& a, const Poly<T>& b) {
  Poly<T> r0 = b, r1 = a, s0 = {}, s1 = {T(1)};
  trim(r1);
  while (r1.size() > 1) {
    auto [q, r] = poly_divmod(r0, r1);
    Poly<T> s = poly_sub(s0, poly_mul(q, s1));
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s);
  }
  if (r1.empty()) throw std::logic_error("inverse_mod: not coprime");
  T c = r1[0];
  for (auto& x : s1) x /= c;
  return s1;
}

std::vector<mpz_class> divisors(mpz_class n) {
  if (n < 0) n = -n;
  std::vector<mpz_class> d;
  if (n == 0 || n > mpz_class(1000000000)) return d;
  for (mpz_class k = 1; k * k <= n; ++k)
    if (n % k == 0) {
      d.push_back(k);
      if (k * k != n) d.push_back(n / k);
    }
  return d;
}

std::vector<Rational> rational_roots(const Poly<Rational>& p) {
  std::vector<Rational> roots;
  if (p.empty()) return roots;
  if (p[0].is_zero()) roots.push_back(Rational(0));
  size_t low = 0;
  while (low < p.size() && p[low].is_zero()) ++low;
  if (low + 1 >= p.size()) return roots;
  mpz_class l = 1;
  for (size_t k = low; k < p.size(); ++k) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), p[k].denominator().get_mpz_t());
  mpz_class a0 = (p[low] * Rational(l, 1)).numerator();
  mpz_class an = (p.back() * Rational(l, 1)).numerator();
  for (const auto& num : divisors(a0))
    for (const auto& den : divisors(an))
      for (int s : {1, -1}) {
        Rational r(num * s, den);
        if (poly_eval(p, r).is_zero()) roots.push_back(r);
      }
  return roots;
}

template <class T>
std::vector<T> field_roots(const Poly<T>& p) {
  std::vector<T> roots;
  if (p.size() == 3) {
    T disc = p[1] * p[1] - T(4) * p[2] * p[0];
    if (auto s = Field<T>::sqrt(disc)) {
      roots.push_back((-p[1] + *s) / (T(2) * p[2]));
      roots.push_back((-p[1] - *s) / (T(2) * p[2]));
    }
    return roots;
  }
  if constexpr (std::is_same_v<T, Rational>) {
    return rational_roots(p);
  } else {
    // Rational roots of p(t) and of p(it) when those have rational coefficients.
    for (int rotate = 0; rotate < 2; ++rotate) {
      Poly<Rational> q;
      Gaussian unit(1);
      bool real = true;
      for (const auto& c : p) {
        Gaussian v = c * unit;
        if (!v.im().is_zero()) real = false;
        q.push_back(v.re());
        if (rotate) unit = unit * Gaussian::i();
      }
      if (!real) continue;
      for (const auto& r : rational_roots(q)) roots.push_back(rotate ? Gaussian(Rational(0), r) : Gaussian(r));
    }
    return roots;
  }
}

template <class T>
Vec<T> flatten(const Mat<T>& m) {
  return Eigen::Map<const Vec<T>>(m.data(), m.size());
}

template <class T>
Mat<T> column_basis_of_parts(const Mat<T>& images, const SuperVectorSpace& s, int& even_count) {
  Mat<T> ev = column_basis<T>(images.leftCols(s.even));
  Mat<T> od = column_basis<T>(images.rightCols(s.odd));
  even_count = static_cast<int>(ev.cols());
  Mat<T> out(images.rows(), ev.cols() + od.cols());
  out << ev, od;
  return out;
}

template <class T>
AlgebraPtr<T> algebra_on_basis(const AlgebraPtr<T>& a, const Mat<T>& basis, int even, const Vec<T>& unit,
                               std::vector<std::string> labels, const std::string& name) {
  Coordinates<T> coords(basis);
  const int n = static_cast<int>(basis.cols());
  typename SuperAlgebra<T>::Table table(n, std::vector<SparseRow<T>>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      table[i][j] = to_sparse<T>(coords.of_unchecked(a->multiply(basis.col(i), basis.col(j))));
  return std::make_shared<const SuperAlgebra<T>>(SuperVectorSpace(even, n - even, std::move(labels)),
                                                 std::move(table), coords.of_unchecked(unit), name);
}

template <class T>
void require_cap(const AlgebraPtr<T>& a) {
  if (a->dim() > kMoritaDimCap)
    throw std::invalid_argument("algebra of dimension " + std::to_string(a->dim()) + " exceeds the cap of " +
                                std::to_string(kMoritaDimCap));
}

// Minimal polynomial of x over the unit u; monic, lowest degree first.
template <class T>
Poly<T> minimal_polynomial(const AlgebraPtr<T>& a, const Vec<T>& u, const Vec<T>& x) {
  std::vector<Vec<T>> powers{u};
  for (;;) {
    Vec<T> next = a->multiply(powers.back(), x);
    Mat<T> cols(next.size(), static_cast<Index>(powers.size()));
    for (size_t k = 0; k < powers.size(); ++k) cols.col(static_cast<Index>(k)) = powers[k];
    auto sol = Coordinates<T>(cols).of(next);
    if (sol) {
      Poly<T> p(powers.size() + 1, T(0));
      for (size_t k = 0; k < powers.size(); ++k) p[k] = -(*sol)(static_cast<Index>(k));
      p.back() = T(1);
      return p;
    }
    powers.push_back(next);
  }
}

template <class T>
Vec<T> evaluate(const AlgebraPtr<T>& a, const Vec<T>& u, const Poly<T>& p, const Vec<T>& x) {
  Vec<T> r = Vec<T>::Zero(x.size());
  for (size_t k = p.size(); k-- > 0;) r = a->multiply(r, x) + p[k] * u;
  return r;
}

// Projection onto the generalized eigenspace of a root of the minimal polynomial.
template <class T>
std::optional<Vec<T>> eigen_idempotent(const AlgebraPtr<T>& a, const Vec<T>& u, const Vec<T>& x) {
  Poly<T> p = minimal_polynomial(a, u, x);
  if (p.size() <= 2) return std::nullopt;
  for (const T& r : field_roots(p)) {
    Poly<T> h{T(1)}, g = p;
    const Poly<T> lin{-r, T(1)};
    for (;;) {
      auto [q, rem] = poly_divmod(g, lin);
      if (!rem.empty()) break;
      g = q;
      h = poly_mul(h, lin);
    }
    if (g.size() <= 1) continue;
    Poly<T> f = poly_mul(inverse_mod(g, h), g);
    Vec<T> e = evaluate(a, u, f, x);
    if (!is_zero_vec<T>(e) && e != u && a->multiply(e, e) == e) return e;
  }
  return std::nullopt;
}

}  // namespace

template <class T>
Corner<T> corner(const AlgebraPtr<T>& a, const Vec<T>& e) {
  const int n = a->dim();
  Mat<T> images(n, n);
  for (int i = 0; i < n; ++i) images.col(i) = a->multiply(a->multiply(e, a->basis(i)), e);
  int even = 0;
  Mat<T> basis = column_basis_of_parts(images, a->carrier(), even);
  std::vector<std::string> labels;
  for (Index k = 0; k < basis.cols(); ++k) labels.push_back("c" + std::to_string(k));
  Corner<T> c;
  c.algebra = algebra_on_basis(a, basis, even, e, labels, "eAe");
  c.embedding = basis;
  c.idempotent = e;
  return c;
}

template <class T>
std::optional<Vec<T>> split_idempotent(const AlgebraPtr<T>& a, const Vec<T>& e) {
  Corner<T> c = corner(a, e);
  const auto& alg = c.algebra;
  const int ev = alg->carrier().even, n = alg->dim();
  const Vec<T>& u = alg->unit();
  auto try_element = [&](const Vec<T>& x) -> std::optional<Vec<T>> {
    if (is_zero_vec<T>(x)) return std::nullopt;
    if (auto f = eigen_idempotent(alg, u, x)) return Vec<T>(mul<T>(c.embedding, *f));
    return std::nullopt;
  };
  for (int i = 0; i < ev; ++i)
    if (auto f = try_element(alg->basis(i))) return f;
  for (int i = ev; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (auto f = try_element(alg->multiply(alg->basis(i), alg->basis(j)))) return f;
  for (int i = 0; i < ev; ++i)
    for (int j = i + 1; j < ev; ++j) {
      if (auto f = try_element(alg->multiply(alg->basis(i), alg->basis(j)))) return f;
      if (auto f = try_element(Vec<T>(alg->basis(i) + alg->basis(j)))) return f;
      if (auto f = try_element(Vec<T>(alg->basis(i) - alg->basis(j)))) return f;
    }
  return std::nullopt;
}

template <class T>
std::vector<Vec<T>> primitive_idempotents(const AlgebraPtr<T>& a) {
  require_cap(a);
  std::vector<Vec<T>> work{a->unit()}, out;
  while (!work.empty()) {
    Vec<T> e = work.back();
    work.pop_back();
    if (auto f = split_idempotent(a, e)) {
      work.push_back(*f);
      work.push_back(e - *f);
    } else {
      out.push_back(e);
    }
  }
  return out;
}

template <class T>
Corner<T> reduce(const AlgebraPtr<T>& a) {
  require_cap(a);
  Vec<T> e = a->unit();
  while (auto f = split_idempotent(a, e)) e = *f;
  return corner(a, e);
}

template <class T>
BimodulePtr<T> left_ideal(const AlgebraPtr<T>& a, const Vec<T>& e) {
  const int n = a->dim();
  Mat<T> images(n, n);
  for (int i = 0; i < n; ++i) images.col(i) = a->multiply(a->basis(i), e);
  int even = 0;
  Mat<T> basis = column_basis_of_parts(images, a->carrier(), even);
  Coordinates<T> coords(basis);
  const int d = static_cast<int>(basis.cols());
  SuperBimodule<T> m;
  m.left_algebra = a;
  m.right_algebra = ground_field<T>();
  std::vector<std::string> labels;
  for (int k = 0; k < d; ++k) labels.push_back("p" + std::to_string(k));
  m.carrier = SuperVectorSpace(even, d - even, labels);
  for (int i = 0; i < n; ++i) {
    Mat<T> act(d, d);
    for (int k = 0; k < d; ++k) act.col(k) = coords.of_unchecked(a->multiply(a->basis(i), basis.col(k)));
    m.left.push_back(act);
  }
  m.right.push_back(identity<T>(d));
  m.name = "A e";
  return make_bimodule(std::move(m));
}

template <class T>
MoritaTrivial<T> morita_trivial(const AlgebraPtr<T>& a) {
  require_cap(a);
  MoritaTrivial<T> out;
  if (!is_central_simple(a).central_simple) {
    out.status = MoritaStatus::NotCentralSimple;
    return out;
  }
  Corner<T> c = reduce(a);
  if (c.algebra->dim() != 1) return out;
  auto s = left_ideal(a, c.idempotent);
  const int d = s->dim();
  if (d * d != a->dim()) return out;
  Mat<T> action(d * d, a->dim());
  for (int i = 0; i < a->dim(); ++i) action.col(i) = flatten<T>(s->left[i]);
  if (rank<T>(action) != a->dim()) return out;
  out.status = MoritaStatus::Trivial;
  out.module = s;
  out.action = action;
  return out;
}

template <class T>
BWClass bw_class(const AlgebraPtr<T>& a) {
  if (!is_central_simple(a).central_simple) throw std::invalid_argument("bw_class: algebra is not central simple");
  constexpr bool real = std::is_same_v<T, Rational>;
  BWClass out;
  out.modulus = real ? 8 : 2;
  // Morita class of A (x) Cl(1,0)^m is that of D_m (x) Cl(1,0) with D_m a corner.
  AlgebraPtr<T> gen = real ? clifford<T>(1, 0) : clifford<T>(0, 1);
  AlgebraPtr<T> d = reduce(a).algebra;
  for (int m = 0; m < out.modulus; ++m) {
    if (d->dim() == 1) {
      out.residue = m;
      return out;
    }
    d = reduce(graded_tensor(d, gen)).algebra;
  }
  throw std::runtime_error("bw_class: no Clifford power trivializes the algebra over " +
                           std::string(Field<T>::tag));
}

template <class T>
Mat<T> jacobson_radical(const AlgebraPtr<T>& a) {
  const int n = a->dim();
  std::vector<T> tr(n, T(0));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (const auto& [idx, c] : a->product(k, l))
        if (idx == l) tr[k] += c;
  Mat<T> form(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T s(0);
      for (const auto& [idx, c] : a->product(i, j)) s += c * tr[idx];
      form(j, i) = s;
    }
  return kernel<T>(form);
}

template <class T>
ProjectiveDecomposition<T> decompose_projectives(const AlgebraPtr<T>& a, Rng& rng) {
  require_cap(a);
  ProjectiveDecomposition<T> out;
  out.radical = jacobson_radical(a);
  out.idempotents = primitive_idempotents(a);
  auto match = [&](const BimodulePtr<T>& p) -> int {
    for (size_t c = 0; c < out.classes.size(); ++c) {
      const auto& q = out.classes[c].module;
      if (!(q->carrier == p->carrier)) continue;
      if (find_isomorphism(p, q, rng).status == SearchStatus::Found) return static_cast<int>(c);
    }
    return -1;
  };
  for (const auto& e : out.idempotents) {
    auto p = left_ideal(a, e);
    int c = match(p);
    if (c < 0) {
      out.classes.push_back({p, 0, false});
      c = static_cast<int>(out.classes.size()) - 1;
    }
    ++out.classes[c].multiplicity;
    out.class_of.push_back(c);
  }
  const size_t regular = out.classes.size();
  for (size_t c = 0; c < regular; ++c) {
    auto flipped = parity_flip(out.classes[c].module);
    if (match(flipped) < 0) out.classes.push_back({flipped, 0, true});
  }
  const size_t k = out.classes.size();
  out.hom_dims.assign(k, std::vector<int>(k, 0));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      out.hom_dims[i][j] =
          static_cast<int>(intertwiner_space(out.classes[i].module, out.classes[j].module).size());
  return out;
}

template <class T>
OppositeEndomorphisms<T> opposite_endomorphisms(const BimodulePtr<T>& p) {
  const auto& a = p->left_algebra;
  const int d = p->dim();
  std::vector<Mat<T>> signed_left;
  for (int i = 0; i < a->dim(); ++i) signed_left.push_back(a->parity(i) ? Mat<T>(-p->left[i]) : p->left[i]);
  OppositeEndomorphisms<T> out;
  auto& ends = out.maps;
  ends = equivariant_maps(p->left, p->left, p->carrier, p->carrier, 0);
  const int even = static_cast<int>(ends.size());
  for (auto& f : equivariant_maps(p->left, signed_left, p->carrier, p->carrier, 1)) ends.push_back(f);
  const int n = static_cast<int>(ends.size());
  Mat<T> flat(d * d, n);
  for (int k = 0; k < n; ++k) flat.col(k) = flatten<T>(ends[k]);
  Coordinates<T> coords(flat);
  auto par = [&](int k) { return k >= even ? 1 : 0; };
  // f *_E g = (-1)^{|f||g|} g o f
  typename SuperAlgebra<T>::Table table(n, std::vector<SparseRow<T>>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat<T> prod = mul<T>(ends[j], ends[i]);
      if (par(i) && par(j)) prod = -prod;
      table[i][j] = to_sparse<T>(coords.of_unchecked(flatten<T>(prod)));
    }
  std::vector<std::string> labels;
  for (int k = 0; k < n; ++k) labels.push_back("f" + std::to_string(k));
  out.algebra = make_algebra<T>(SuperVectorSpace(even, n - even, labels), table,
                                coords.of_unchecked(flatten<T>(identity<T>(d))), "End_A(P)^op");
  Mat<T> sign = identity<T>(d);
  for (int k = p->carrier.even; k < d; ++k) sign(k, k) = T(-1);
  SuperBimodule<T> m;
  m.left_algebra = a;
  m.right_algebra = out.algebra;
  m.carrier = p->carrier;
  m.left = p->left;
  for (int k = 0; k < n; ++k) m.right.push_back(par(k) ? mul<T>(ends[k], sign) : ends[k]);
  m.name = "P";
  out.module = make_bimodule(std::move(m));
  return out;
}

template <class T>
PicardSurjectification<T> picard_surjectify(const AlgebraPtr<T>& a, Rng& rng) {
  PicardSurjectification<T> out;
  out.decomposition = decompose_projectives(a, rng);
  BimodulePtr<T> p = out.decomposition.classes[0].module;
  for (size_t c = 1; c < out.decomposition.classes.size(); ++c)
    p = direct_sum(p, out.decomposition.classes[c].module);
  auto ends = opposite_endomorphisms(p);
  out.algebra = ends.algebra;
  out.module = ends.module;
  auto cert = certify_invertible(out.module);
  if (!cert) throw std::runtime_error("picard_surjectify: projective sum is not invertible");
  out.certificate = *cert;
  return out;
}

template <class T>
PicardSearch<T> picard_witness(const BimodulePtr<T>& m, Rng& rng) {
  PicardSearch<T> out;
  const auto& a = m->left_algebra;
  if (m->carrier.even == 0) {
    out.status = SearchStatus::ZeroSpace;
    return out;
  }
  if (m->dim() != a->dim() || !same_algebra(a, m->right_algebra)) return out;
  const int n = a->dim();
  std::vector<Mat<T>> gens;
  for (int k = 0; k < m->carrier.even; ++k) {
    Mat<T> r(n, n);
    for (int i = 0; i < n; ++i) r.col(i) = m->left[i].col(k);
    gens.push_back(r);
  }
  auto found = find_invertible(gens, rng);
  out.status = found.status;
  if (found.status != SearchStatus::Found) return out;
  const Mat<T>& r = *found.matrix;
  Mat<T> rinv = *inverse<T>(r);
  Vec<T> m0 = mul<T>(r, a->unit());
  Mat<T> phi(n, n);
  for (int j = 0; j < n; ++j) phi.col(j) = mul<T>(rinv, Vec<T>(mul<T>(m->right[j], m0)));
  PicardWitness<T> w{AlgebraHom<T>{a, a, phi}, Intertwiner<T>{}};
  if (!w.phi.check().empty() || !w.phi.is_automorphism()) {
    out.status = SearchStatus::NotFound;
    return out;
  }
  w.iso = Intertwiner<T>{twisted_regular(w.phi), m, r};
  if (!check_intertwiner(w.iso).empty()) {
    out.status = SearchStatus::NotFound;
    return out;
  }
  out.witness = w;
  return out;
}

#define S2V_INSTANTIATE(T)                                                                      \
  template Corner<T> corner<T>(const AlgebraPtr<T>&, const Vec<T>&);                            \
  template std::optional<Vec<T>> split_idempotent<T>(const AlgebraPtr<T>&, const Vec<T>&);      \
  template std::vector<Vec<T>> primitive_idempotents<T>(const AlgebraPtr<T>&);                  \
  template Corner<T> reduce<T>(const AlgebraPtr<T>&);                                           \
  template BimodulePtr<T> left_ideal<T>(const AlgebraPtr<T>&, const Vec<T>&);                   \
  template MoritaTrivial<T> morita_trivial<T>(const AlgebraPtr<T>&);                            \
  template BWClass bw_class<T>(const AlgebraPtr<T>&);                                           \
  template Mat<T> jacobson_radical<T>(const AlgebraPtr<T>&);                                    \
  template ProjectiveDecomposition<T> decompose_projectives<T>(const AlgebraPtr<T>&, Rng&);     \
  template OppositeEndomorphisms<T> opposite_endomorphisms<T>(const BimodulePtr<T>&);                \
  template PicardSurjectification<T> picard_surjectify<T>(const AlgebraPtr<T>&, Rng&);          \
  template PicardSearch<T> picard_witness<T>(const BimodulePtr<T>&, Rng&);

S2V_INSTANTIATE(Rational)
S2V_INSTANTIATE(Gaussian)

}  // namespace super2vec
