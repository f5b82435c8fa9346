#include "super2vec/crossed.hpp"

#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace super2vec {

namespace {

template <class T>
T power(T x, long k) {
  if (k < 0) {
    x = T(1) / x;
    k = -k;
  }
  T r(1);
  while (k > 0) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

std::string simplex_name(const Simplex& s) {
  std::string out = "(";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

template <class T>
std::string mat_string(const Mat<T>& m) {
  std::ostringstream os;
  os << "[";
  for (Index i = 0; i < m.rows(); ++i) {
    if (i) os << "; ";
    for (Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
  }
  os << "]";
  return os.str();
}

template <class T>
std::string vec_string(const Vec<T>& v) {
  std::ostringstream os;
  os << "(";
  for (Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v(i);
  os << ")";
  return os.str();
}

// lambda with v = lambda * unit, when v is a scalar.
template <class T>
std::optional<T> scalar_of(const AlgebraPtr<T>& a, const Vec<T>& v) {
  const Vec<T>& u = a->unit();
  Index k = 0;
  while (is_zero(u(k))) ++k;
  T lambda = v(k) / u(k);
  if (v != Vec<T>(lambda * u)) return std::nullopt;
  return lambda;
}

template <class T>
UnitElement<T> scalar_unit(const AlgebraPtr<T>& a, const T& lambda) {
  return *UnitElement<T>::from(a, Vec<T>(lambda * a->unit()));
}

template <class T>
Vec<T> flatten(const Mat<T>& m) {
  return Eigen::Map<const Vec<T>>(m.data(), m.size());
}

template <class T>
UnitElement<T> sample_even_unit(const AlgebraPtr<T>& a, Rng& rng) {
  for (;;) {
    Vec<T> v = Vec<T>::Zero(a->dim());
    for (int i = 0; i < a->carrier().even; ++i) v(i) = Field<T>::sample(rng);
    if (auto u = UnitElement<T>::from(a, v)) return *u;
  }
}

}  // namespace

template <class T>
UnitCochain<T> UnitCochain<T>::one(NervePtr nerve, int degree) {
  UnitCochain c;
  c.values.assign(nerve->count(degree), T(1));
  c.nerve = std::move(nerve);
  c.degree = degree;
  return c;
}

template <class T>
UnitCochain<T> UnitCochain<T>::operator*(const UnitCochain& o) const {
  if (degree != o.degree || values.size() != o.values.size()) throw std::invalid_argument("cochain shape mismatch");
  UnitCochain r = *this;
  for (size_t i = 0; i < values.size(); ++i) r.values[i] *= o.values[i];
  return r;
}

template <class T>
UnitCochain<T> UnitCochain<T>::inverse() const {
  UnitCochain r = *this;
  for (auto& v : r.values) v = T(1) / v;
  return r;
}

template <class T>
UnitCochain<T> coboundary(const UnitCochain<T>& c) {
  UnitCochain<T> out = UnitCochain<T>::one(c.nerve, c.degree + 1);
  const auto& cells = c.nerve->simplices(c.degree + 1);
  for (size_t k = 0; k < cells.size(); ++k)
    for (int i = 0; i <= c.degree + 1; ++i) {
      const T& v = c.at(face(cells[k], i));
      out.values[k] = i % 2 == 0 ? out.values[k] * v : out.values[k] / v;
    }
  return out;
}

template <class T>
bool is_cocycle(const UnitCochain<T>& c) {
  if (c.degree + 1 > Nerve::kMaxDim || c.nerve->count(c.degree + 1) == 0) return true;
  for (const auto& v : coboundary(c).values)
    if (!(v == T(1))) return false;
  return true;
}

template <class T>
std::optional<T> nth_root(const T& x, long n) {
  if (n <= 0) throw std::invalid_argument("nth_root: n must be positive");
  if (n == 1 || is_zero(x)) return x;
  if constexpr (std::is_same_v<T, Rational>) {
    if (x.sign() < 0 && n % 2 == 0) return std::nullopt;
    mpz_class num = abs(x.numerator()), den = x.denominator(), rn, rd;
    if (!mpz_root(rn.get_mpz_t(), num.get_mpz_t(), n) || !mpz_root(rd.get_mpz_t(), den.get_mpz_t(), n))
      return std::nullopt;
    Rational r(rn, rd);
    return x.sign() < 0 ? -r : r;
  } else {
    if (n % 2 == 0) {
      auto s = Field<Gaussian>::sqrt(x);
      if (!s) return std::nullopt;
      for (const Gaussian& c : {*s, -*s})
        if (auto r = nth_root(c, n / 2)) return r;
      return std::nullopt;
    }
    // Odd n: roots of the form unit * rational.
    for (const Gaussian& unit : Field<Gaussian>::grid_units()) {
      Gaussian scaled = x / power(unit, n);
      if (!scaled.im().is_zero()) continue;
      if (auto r = nth_root(scaled.re(), n)) return unit * Gaussian(*r);
    }
    return std::nullopt;
  }
}

template <class T>
std::optional<UnitCochain<T>> coboundary_preimage(const UnitCochain<T>& c) {
  if (c.degree < 1) throw std::invalid_argument("coboundary_preimage: degree must be positive");
  if (!is_cocycle(c)) return std::nullopt;
  IntegerChainComplex cx = c.nerve->cochain_complex();
  // Above the top dimension the cochain group is zero.
  const IntMatrix d = c.degree - 1 < static_cast<int>(cx.delta.size()) ? cx.delta[c.degree - 1]
                                                                       : IntMatrix(0, c.nerve->count(c.degree - 1));
  SmithForm snf = smith_normal_form(d);
  const int rows = d.rows(), cols = d.cols();
  // D = U d V: with lambda = V mu, c = d lambda becomes (U c)_i = d_i mu_i.
  std::vector<T> mu(cols, T(1));
  for (int i = 0; i < rows; ++i) {
    T r(1);
    for (int t = 0; t < rows; ++t)
      if (snf.u(i, t) != 0) r *= power(c.values[t], snf.u(i, t).get_si());
    if (i < snf.rank) {
      auto root = nth_root(r, snf.diag(i).get_si());
      if (!root) return std::nullopt;
      mu[i] = *root;
    } else if (!(r == T(1))) {
      return std::nullopt;
    }
  }
  UnitCochain<T> lambda = UnitCochain<T>::one(c.nerve, c.degree - 1);
  for (int e = 0; e < cols; ++e)
    for (int j = 0; j < cols; ++j)
      if (snf.v(e, j) != 0) lambda.values[e] *= power(mu[j], snf.v(e, j).get_si());
  if (!(coboundary(lambda) == c)) throw std::logic_error("coboundary_preimage: Smith form reconstruction failed");
  return lambda;
}

template <class T>
std::optional<FiniteRepresentative<T>> finite_representative(const UnitCochain<T>& x, int m) {
  if (m < 1 || !Field<T>::supports_modulus(m))
    throw std::invalid_argument("finite_representative: no primitive " + std::to_string(m) + "-th root of unity");
  if (x.degree < 1) throw std::invalid_argument("finite_representative: degree must be positive");
  if (!is_cocycle(x)) return std::nullopt;
  IntegerChainComplex cx = x.nerve->cochain_complex();
  const IntMatrix d = x.degree - 1 < static_cast<int>(cx.delta.size()) ? cx.delta[x.degree - 1]
                                                                       : IntMatrix(0, x.nerve->count(x.degree - 1));
  SmithForm snf = smith_normal_form(d);
  const int rows = d.rows(), cols = d.cols();
  // With U d V = D, x = zeta d(nu) reads (U x)_i = (U zeta)_i mu_i^{d_i}, nu = V mu.
  std::vector<int> k(rows, 0);
  std::vector<T> mu(cols, T(1));
  for (int i = 0; i < rows; ++i) {
    T y(1);
    for (int t = 0; t < rows; ++t)
      if (snf.u(i, t) != 0) y *= power(x.values[t], snf.u(i, t).get_si());
    bool found = false;
    for (int p = 0; p < m && !found; ++p) {
      const T r = y / Field<T>::root_of_unity(m, p);
      if (i < snf.rank) {
        if (auto root = nth_root(r, snf.diag(i).get_si())) {
          mu[i] = *root;
          found = true;
        }
      } else {
        found = r == T(1);
      }
      if (found) k[i] = p;
    }
    if (!found) return std::nullopt;
  }
  FiniteRepresentative<T> out{AbelianCochain::zero(x.nerve, x.degree, m), UnitCochain<T>::one(x.nerve, x.degree - 1)};
  for (int t = 0; t < rows; ++t) {
    mpz_class s = 0;
    for (int i = 0; i < rows; ++i) s += snf.u_inv(t, i) * k[i];
    out.phases.values[t] = mpz_class(s % m).get_si();
  }
  out.phases.normalize();
  for (int e = 0; e < cols; ++e)
    for (int j = 0; j < cols; ++j)
      if (snf.v(e, j) != 0) out.nu.values[e] *= power(mu[j], snf.v(e, j).get_si());
  if (!(roots_of_unity<T>(out.phases) * coboundary(out.nu) == x))
    throw std::logic_error("finite_representative: Smith form reconstruction failed");
  return out;
}

template <class T>
bool same_class(const UnitCochain<T>& a, const UnitCochain<T>& b) {
  return coboundary_preimage(a * b.inverse()).has_value();
}

template <class T>
UnitCochain<T> roots_of_unity(const AbelianCochain& c) {
  UnitCochain<T> out = UnitCochain<T>::one(c.nerve, c.degree);
  for (size_t k = 0; k < c.values.size(); ++k)
    out.values[k] = Field<T>::root_of_unity(c.modulus, static_cast<int>(c.values[k]));
  return out;
}

template <class T>
std::optional<AbelianCochain> phases(const UnitCochain<T>& c, int m) {
  AbelianCochain out = AbelianCochain::zero(c.nerve, c.degree, m);
  for (size_t k = 0; k < c.values.size(); ++k) {
    auto p = Field<T>::phase(c.values[k], m);
    if (!p || !(c.values[k] == Field<T>::root_of_unity(m, *p))) return std::nullopt;
    out.values[k] = *p;
  }
  return out;
}

template <class T>
CocycleReport validate_cocycle(const CMCocycle<T>& c) {
  CocycleReport r;
  const auto& nerve = *c.nerve;
  if (static_cast<int>(c.g.size()) != nerve.count(1) || static_cast<int>(c.a.size()) != nerve.count(2)) {
    r.failures.push_back("shape: expected " + std::to_string(nerve.count(1)) + " edge values and " +
                         std::to_string(nerve.count(2)) + " triangle values");
    return r;
  }
  for (int k = 0; k < nerve.count(1); ++k) {
    if (!c.g[k].check().empty() || !c.g[k].is_automorphism())
      r.failures.push_back("edge " + simplex_name(nerve.simplices(1)[k]) + ": not an even automorphism");
  }
  for (int k = 0; k < nerve.count(2); ++k) {
    if (c.a[k].parity != 0)
      r.failures.push_back("triangle " + simplex_name(nerve.simplices(2)[k]) + ": a is not even");
  }
  if (!r.ok()) return r;
  for (const auto& s : nerve.simplices(2)) {
    AlgebraHom<T> lhs = compose(conjugation(c.a_at(s[0], s[1], s[2])), compose(c.g_at(s[1], s[2]), c.g_at(s[0], s[1])));
    const AlgebraHom<T>& rhs = c.g_at(s[0], s[2]);
    if (!(lhs == rhs))
      r.failures.push_back("triangle " + simplex_name(s) + ": i(a) g_bc g_ab = " + mat_string<T>(lhs.map) +
                           " but g_ac = " + mat_string<T>(rhs.map));
  }
  if (nerve.count(3) == 0) return r;
  for (const auto& s : nerve.simplices(3)) {
    UnitElement<T> lhs = c.a_at(s[0], s[2], s[3]) * apply_hom(c.g_at(s[2], s[3]), c.a_at(s[0], s[1], s[2]));
    UnitElement<T> rhs = c.a_at(s[0], s[1], s[3]) * c.a_at(s[1], s[2], s[3]);
    if (!(lhs == rhs))
      r.failures.push_back("tetrahedron " + simplex_name(s) + ": a_acd g_cd(a_abc) = " + vec_string<T>(lhs.value) +
                           " but a_abd a_bcd = " + vec_string<T>(rhs.value));
  }
  return r;
}

template <class T>
CMCocycle<T> trivial_cocycle(const NervePtr& nerve, const AlgebraPtr<T>& a) {
  CMCocycle<T> c{nerve, a, {}, {}};
  c.g.assign(nerve->count(1), identity_hom(a));
  c.a.assign(nerve->count(2), UnitElement<T>::one(a));
  return c;
}

template <class T>
CMCocycle<T> parity_cocycle(const AbelianCochain& eps, const AlgebraPtr<T>& a) {
  if (eps.degree != 1 || eps.modulus != 2) throw std::invalid_argument("parity_cocycle: need a Z/2 1-cochain");
  CMCocycle<T> c = trivial_cocycle(eps.nerve, a);
  AlgebraHom<T> eta = parity_operator(a);
  for (size_t k = 0; k < eps.values.size(); ++k)
    if (eps.values[k] % 2 != 0) c.g[k] = eta;
  return c;
}

template <class T>
CMCocycle<T> scalar_twist(const CMCocycle<T>& c, const UnitCochain<T>& z) {
  CMCocycle<T> out = c;
  for (size_t k = 0; k < out.a.size(); ++k) out.a[k] = out.a[k] * scalar_unit(c.algebra, z.values[k]);
  return out;
}

template <class T>
CoboundaryData<T> trivial_coboundary(const CMCocycle<T>& c) {
  CoboundaryData<T> d;
  d.h.assign(c.nerve->count(0), identity_hom(c.algebra));
  d.e.assign(c.nerve->count(1), UnitElement<T>::one(c.algebra));
  return d;
}

template <class T>
CMCocycle<T> apply_coboundary(const CMCocycle<T>& c, const CoboundaryData<T>& d) {
  CMCocycle<T> out = c;
  const auto& nerve = *c.nerve;
  for (int k = 0; k < nerve.count(1); ++k) {
    const auto& s = nerve.simplices(1)[k];
    out.g[k] = compose(compose(conjugation(d.e[k]), d.h[s[1]]), compose(c.g[k], inverse_hom(d.h[s[0]])));
  }
  for (int k = 0; k < nerve.count(2); ++k) {
    const auto& s = nerve.simplices(2)[k];
    const auto& e_ab = d.e[nerve.index_of({s[0], s[1]})];
    const auto& e_bc = d.e[nerve.index_of({s[1], s[2]})];
    const auto& e_ac = d.e[nerve.index_of({s[0], s[2]})];
    const auto& g_bc = out.g[nerve.index_of({s[1], s[2]})];
    out.a[k] = e_ac * apply_hom(d.h[s[2]], c.a[k]) * e_bc.inv() * apply_hom(g_bc, e_ab).inv();
  }
  return out;
}

template <class T>
CocycleReport coboundary_report(const CMCocycle<T>& c, const CMCocycle<T>& c2, const CoboundaryData<T>& d) {
  CocycleReport r;
  const auto& nerve = *c.nerve;
  if (!(nerve == *c2.nerve) || !same_algebra(c.algebra, c2.algebra)) {
    r.failures.push_back("cocycles live on different nerves or algebras");
    return r;
  }
  for (int k = 0; k < nerve.count(1); ++k) {
    const auto& s = nerve.simplices(1)[k];
    AlgebraHom<T> lhs = compose(compose(conjugation(d.e[k]), d.h[s[1]]), c.g[k]);
    AlgebraHom<T> rhs = compose(c2.g[k], d.h[s[0]]);
    if (!(lhs == rhs)) r.failures.push_back("edge " + simplex_name(s) + ": i(e) h_b g != g' h_a");
  }
  for (int k = 0; k < nerve.count(2); ++k) {
    const auto& s = nerve.simplices(2)[k];
    const auto& e_ab = d.e[nerve.index_of({s[0], s[1]})];
    const auto& e_bc = d.e[nerve.index_of({s[1], s[2]})];
    const auto& e_ac = d.e[nerve.index_of({s[0], s[2]})];
    UnitElement<T> lhs = c2.a[k] * apply_hom(c2.g[nerve.index_of({s[1], s[2]})], e_ab) * e_bc;
    UnitElement<T> rhs = e_ac * apply_hom(d.h[s[2]], c.a[k]);
    if (!(lhs == rhs)) r.failures.push_back("triangle " + simplex_name(s) + ": a' g'_bc(e_ab) e_bc != e_ac h_c(a)");
  }
  return r;
}

template <class T>
CMCocycle<T> tensor_cocycles(const CMCocycle<T>& c, const CMCocycle<T>& c2, AlgebraPtr<T> target) {
  if (!(*c.nerve == *c2.nerve)) throw std::invalid_argument("tensor_cocycles: nerve mismatch");
  if (!target) target = graded_tensor(c.algebra, c2.algebra);
  PairLayout layout(c.algebra->carrier(), c2.algebra->carrier());
  CMCocycle<T> out{c.nerve, target, {}, {}};
  for (size_t k = 0; k < c.g.size(); ++k) out.g.push_back(tensor_hom(c.g[k], c2.g[k], target, target));
  for (size_t k = 0; k < c.a.size(); ++k)
    out.a.push_back(*UnitElement<T>::from(target, tensor_element(layout, c.a[k].value, c2.a[k].value)));
  return out;
}

template <class T>
std::optional<CSALift<T>> csa_lift(const AlgebraHom<T>& phi, Rng& rng) {
  const auto& a = phi.source;
  const int n = a->dim();
  for (int eps = 0; eps <= 1; ++eps) {
    Mat<T> hb = homogeneous_basis<T>(a->carrier(), eps);
    if (hb.cols() == 0) continue;
    // phi(b_j) u = (-1)^{eps |b_j|} u b_j
    Mat<T> sys(static_cast<Index>(n) * n, n);
    for (int j = 0; j < n; ++j) {
      Mat<T> block = a->left_mult(phi(a->basis(j)));
      Mat<T> r = a->right_basis(j);
      if (eps && a->parity(j)) r = -r;
      sys.middleRows(static_cast<Index>(j) * n, n) = block - r;
    }
    Mat<T> ker = kernel<T>(Mat<T>(mul<T>(sys, hb)));
    if (ker.cols() == 0) continue;
    auto found = find_unit(a, Mat<T>(mul<T>(hb, ker)), rng);
    if (found.status == SearchStatus::Found) return CSALift<T>{eps, *found.unit};
  }
  return std::nullopt;
}

template <class T>
CocycleReport validate_scalar_cocycle(const ScalarCocycle<T>& s) {
  CocycleReport r;
  if (s.epsilon.degree != 1 || s.epsilon.modulus != 2) r.failures.push_back("epsilon must be a Z/2 1-cochain");
  else if (!is_cocycle(s.epsilon)) r.failures.push_back("epsilon is not a cocycle");
  if (s.x.degree != 2) r.failures.push_back("x must be a 2-cochain");
  else if (!is_cocycle(s.x)) r.failures.push_back("x is not a cocycle");
  return r;
}

template <class T>
bool same_class(const ScalarCocycle<T>& a, const ScalarCocycle<T>& b) {
  return same_class(a.epsilon, b.epsilon) && same_class(a.x, b.x);
}

template <class T>
ScalarCocycle<T> twisted_product(const ScalarCocycle<T>& a, const ScalarCocycle<T>& b) {
  ScalarCocycle<T> out{a.epsilon + b.epsilon, a.x * b.x};
  AbelianCochain cup = cup_product(a.epsilon, b.epsilon);
  for (size_t k = 0; k < out.x.values.size(); ++k)
    if (cup.values[k] % 2 != 0) out.x.values[k] = -out.x.values[k];
  return out;
}

template <class T>
CSAInvariants<T> csa_invariants(const CMCocycle<T>& c, Rng& rng) {
  CSAInvariants<T> out;
  const auto& nerve = *c.nerve;
  out.cocycle.epsilon = AbelianCochain::zero(c.nerve, 1, 2);
  for (int k = 0; k < nerve.count(1); ++k) {
    auto l = csa_lift(c.g[k], rng);
    if (!l)
      throw std::runtime_error("csa_invariants: no invertible intertwiner on edge " +
                               simplex_name(nerve.simplices(1)[k]));
    out.cocycle.epsilon.values[k] = l->eps;
    out.lifts.push_back(*l);
  }
  out.cocycle.x = UnitCochain<T>::one(c.nerve, 2);
  for (int k = 0; k < nerve.count(2); ++k) {
    const auto& s = nerve.simplices(2)[k];
    const auto& u_ab = out.lifts[nerve.index_of({s[0], s[1]})].u;
    const auto& u_bc = out.lifts[nerve.index_of({s[1], s[2]})].u;
    const auto& u_ac = out.lifts[nerve.index_of({s[0], s[2]})].u;
    UnitElement<T> v = c.a[k] * u_bc * u_ab * u_ac.inv();
    auto x = scalar_of(c.algebra, v.value);
    if (!x) throw std::runtime_error("csa_invariants: f_ac f_ab^-1 f_bc^-1 r_a is not scalar on " + simplex_name(s));
    out.cocycle.x.values[k] = *x;
  }
  auto report = validate_scalar_cocycle(out.cocycle);
  if (!report.ok()) throw std::logic_error("csa_invariants: " + report.failures.front());
  return out;
}

template <class T>
std::optional<CoboundaryData<T>> find_coboundary(const CMCocycle<T>& c, const CMCocycle<T>& c2, Rng& rng) {
  const auto& a = c.algebra;
  const auto& nerve = *c.nerve;
  auto inv1 = csa_invariants(c, rng), inv2 = csa_invariants(c2, rng);
  auto nu = coboundary_preimage(inv2.cocycle.epsilon - inv1.cocycle.epsilon);
  if (!nu) return std::nullopt;
  std::optional<UnitElement<T>> odd_unit;
  if (a->carrier().odd > 0) {
    auto f = find_unit(a, homogeneous_basis<T>(a->carrier(), 1), rng);
    if (f.status == SearchStatus::Found) odd_unit = f.unit;
  }
  std::vector<long> nu_v(nerve.count(0), 0);
  if (nu->degree == 0 && !nu->values.empty())
    for (int v = 0; v < nerve.count(0); ++v) nu_v[v] = nu->values[v] % 2;
  if (!odd_unit) {
    // Without odd units nu must be constant on components; shift it to zero.
    auto comp = nerve.components();
    for (int v = 0; v < nerve.count(0); ++v)
      for (int w = 0; w < nerve.count(0); ++w)
        if (comp[v] == comp[w] && nu_v[v] != nu_v[w]) return std::nullopt;
    std::fill(nu_v.begin(), nu_v.end(), 0);
  }
  CoboundaryData<T> d;
  std::vector<UnitElement<T>> w;
  AlgebraHom<T> eta = parity_operator(a);
  for (int v = 0; v < nerve.count(0); ++v) {
    w.push_back(nu_v[v] ? *odd_unit : UnitElement<T>::one(a));
    AlgebraHom<T> h = conjugation(w.back());
    d.h.push_back(nu_v[v] ? compose(eta, h) : h);
  }
  for (int k = 0; k < nerve.count(1); ++k) {
    const auto& s = nerve.simplices(1)[k];
    UnitElement<T> u2 = w[s[1]] * inv1.lifts[k].u * w[s[0]].inv();
    d.e.push_back(inv2.lifts[k].u * u2.inv());
  }
  UnitCochain<T> ratio = UnitCochain<T>::one(c.nerve, 2);
  for (int k = 0; k < nerve.count(2); ++k) {
    const auto& s = nerve.simplices(2)[k];
    const auto& e_ab = d.e[nerve.index_of({s[0], s[1]})];
    const auto& e_bc = d.e[nerve.index_of({s[1], s[2]})];
    const auto& e_ac = d.e[nerve.index_of({s[0], s[2]})];
    UnitElement<T> lhs = c2.a[k] * apply_hom(c2.g[nerve.index_of({s[1], s[2]})], e_ab) * e_bc;
    UnitElement<T> rhs = e_ac * apply_hom(d.h[s[2]], c.a[k]);
    auto x = scalar_of(a, (lhs * rhs.inv()).value);
    if (!x) return std::nullopt;
    ratio.values[k] = T(1) / *x;
  }
  auto lambda = coboundary_preimage(ratio);
  if (!lambda) return std::nullopt;
  for (int k = 0; k < nerve.count(1); ++k) d.e[k] = d.e[k] * scalar_unit(a, lambda->values[k]);
  if (!verify_coboundary(c, c2, d)) return std::nullopt;
  return d;
}

template <class T>
std::vector<std::string> check_crossed_module(const AlgebraPtr<T>& a, Rng& rng, int samples) {
  std::vector<std::string> out;
  AlgebraHom<T> eta = parity_operator(a);
  for (int s = 0; s < samples; ++s) {
    AlgebraHom<T> phi = conjugation(sample_even_unit(a, rng));
    if (s % 2) phi = compose(eta, phi);
    UnitElement<T> h = sample_even_unit(a, rng), h2 = sample_even_unit(a, rng);
    if (!(conjugation(apply_hom(phi, h)) == compose(compose(phi, conjugation(h)), inverse_hom(phi))))
      out.push_back("i(phi(h)) != phi i(h) phi^-1");
    if (!(apply_hom(conjugation(h), h2) == h * h2 * h.inv())) out.push_back("i(h)(h') != h h' h^-1");
  }
  return out;
}

template <class T>
MoritaButterfly<T> morita_butterfly(const BimodulePtr<T>& m, std::shared_ptr<Rng> rng) {
  using K = MoritaElement<T>;
  AlgebraPtr<T> a = m->left_algebra, b = m->right_algebra;
  Mat<T> rights(static_cast<Index>(m->dim()) * m->dim(), b->dim());
  for (int j = 0; j < b->dim(); ++j) rights.col(j) = flatten<T>(m->right[j]);
  auto coords = std::make_shared<Coordinates<T>>(rights);
  MoritaButterfly<T> bf;
  bf.mul = [](const K& x, const K& y) { return K{compose(x.phi, y.phi), compose(x.psi, y.psi), mul<T>(x.f, y.f)}; };
  bf.inv = [](const K& x) { return K{inverse_hom(x.phi), inverse_hom(x.psi), *inverse<T>(x.f)}; };
  bf.equal = [](const K& x, const K& y) { return x.phi == y.phi && x.psi == y.psi && x.f == y.f; };
  bf.i1 = [m, b](const UnitElement<T>& u) { return K{conjugation(u), identity_hom(b), m->act_left(u.value)}; };
  bf.i2 = [m, a](const UnitElement<T>& u) { return K{identity_hom(a), conjugation(u), m->act_right(u.inverse)}; };
  bf.p1 = [](const K& x) { return x.phi; };
  bf.p2 = [](const K& x) { return x.psi; };
  bf.lift = [m, a, b, coords, rng](const AlgebraHom<T>& phi) -> std::optional<K> {
    AlgebraHom<T> phinv = inverse_hom(phi);
    std::vector<Mat<T>> s, t;
    for (int i = 0; i < a->dim(); ++i) {
      s.push_back(m->act_left(phinv(a->basis(i))));
      t.push_back(m->left[i]);
    }
    auto found = find_invertible(equivariant_maps(s, t, m->carrier, m->carrier, 0), *rng);
    if (found.status != SearchStatus::Found) return std::nullopt;
    const Mat<T>& f = *found.matrix;
    Mat<T> finv = *inverse<T>(f);
    Mat<T> psi(b->dim(), b->dim());
    for (int j = 0; j < b->dim(); ++j) {
      auto c = coords->of(flatten<T>(Mat<T>(mul<T>(mul<T>(f, m->right[j]), finv))));
      if (!c) return std::nullopt;
      psi.col(j) = *c;
    }
    AlgebraHom<T> hom{b, b, psi};
    if (!hom.check().empty()) return std::nullopt;
    return K{phi, hom, f};
  };
  bf.preimage = [b, coords, bf](const K& k) -> std::optional<UnitElement<T>> {
    if (!(k.phi == identity_hom(k.phi.source))) return std::nullopt;
    auto c = coords->of(flatten<T>(k.f));
    if (!c) return std::nullopt;
    auto u = UnitElement<T>::from(b, *c);
    if (!u || u->parity != 0) return std::nullopt;
    UnitElement<T> out = u->inv();
    if (!(conjugation(out) == k.psi)) return std::nullopt;
    return out;
  };
  return bf;
}

template <class T>
CSAButterfly<T> csa_butterfly(const AlgebraPtr<T>& a, std::shared_ptr<Rng> rng) {
  using K = CSAElement<T>;
  CSAButterfly<T> bf;
  bf.mul = [](const K& x, const K& y) { return K{compose(x.phi, y.phi), (x.eps + y.eps) % 2, x.u * y.u}; };
  bf.inv = [](const K& x) { return K{inverse_hom(x.phi), x.eps, x.u.inv()}; };
  bf.equal = [](const K& x, const K& y) { return x.phi == y.phi && x.eps == y.eps && x.u == y.u; };
  bf.i1 = [](const UnitElement<T>& u) { return K{conjugation(u), 0, u}; };
  bf.i2 = [a](const T& lambda) { return K{identity_hom(a), 0, scalar_unit(a, T(1) / lambda)}; };
  bf.p1 = [](const K& x) { return x.phi; };
  bf.p2 = [](const K& x) { return x.eps; };
  bf.lift = [rng](const AlgebraHom<T>& phi) -> std::optional<K> {
    auto l = csa_lift(phi, *rng);
    if (!l) return std::nullopt;
    return K{phi, l->eps, l->u};
  };
  bf.preimage = [a](const K& k) -> std::optional<T> {
    if (!(k.phi == identity_hom(a)) || k.eps != 0) return std::nullopt;
    auto s = scalar_of(a, k.u.value);
    if (!s) return std::nullopt;
    return T(1) / *s;
  };
  return bf;
}

template <class T>
CMCocycle<T> transport_cocycle(const MoritaButterfly<T>& bf, const CMCocycle<T>& c, const AlgebraPtr<T>& target,
                               const std::vector<MoritaElement<T>>* lifts) {
  auto tr = butterfly_transport(bf, c.nerve, c.g, c.a, lifts);
  if (!tr.ok()) throw std::runtime_error("butterfly transport: " + tr.errors.front());
  return CMCocycle<T>{c.nerve, target, tr.f, tr.b};
}

template <class T>
ScalarCocycle<T> transport_scalar(const CSAButterfly<T>& bf, const CMCocycle<T>& c) {
  auto tr = butterfly_transport(bf, c.nerve, c.g, c.a);
  if (!tr.ok()) throw std::runtime_error("butterfly transport: " + tr.errors.front());
  ScalarCocycle<T> out{AbelianCochain::zero(c.nerve, 1, 2), UnitCochain<T>::one(c.nerve, 2)};
  for (size_t k = 0; k < tr.f.size(); ++k) out.epsilon.values[k] = tr.f[k];
  out.x.values = tr.b;
  return out;
}

#define S2V_INSTANTIATE(T)                                                                                    \
  template struct UnitCochain<T>;                                                                             \
  template UnitCochain<T> coboundary<T>(const UnitCochain<T>&);                                               \
  template bool is_cocycle<T>(const UnitCochain<T>&);                                                         \
  template std::optional<UnitCochain<T>> coboundary_preimage<T>(const UnitCochain<T>&);                       \
  template bool same_class<T>(const UnitCochain<T>&, const UnitCochain<T>&);                                  \
  template UnitCochain<T> roots_of_unity<T>(const AbelianCochain&);                                           \
  template std::optional<AbelianCochain> phases<T>(const UnitCochain<T>&, int);                               \
  template std::optional<T> nth_root<T>(const T&, long);                                                      \
  template std::optional<FiniteRepresentative<T>> finite_representative<T>(const UnitCochain<T>&, int);       \
  template CocycleReport validate_cocycle<T>(const CMCocycle<T>&);                                            \
  template CMCocycle<T> trivial_cocycle<T>(const NervePtr&, const AlgebraPtr<T>&);                            \
  template CMCocycle<T> parity_cocycle<T>(const AbelianCochain&, const AlgebraPtr<T>&);                       \
  template CMCocycle<T> scalar_twist<T>(const CMCocycle<T>&, const UnitCochain<T>&);                          \
  template CoboundaryData<T> trivial_coboundary<T>(const CMCocycle<T>&);                                      \
  template CMCocycle<T> apply_coboundary<T>(const CMCocycle<T>&, const CoboundaryData<T>&);                   \
  template CocycleReport coboundary_report<T>(const CMCocycle<T>&, const CMCocycle<T>&,                       \
                                              const CoboundaryData<T>&);                                      \
  template CMCocycle<T> tensor_cocycles<T>(const CMCocycle<T>&, const CMCocycle<T>&, AlgebraPtr<T>);          \
  template std::optional<CSALift<T>> csa_lift<T>(const AlgebraHom<T>&, Rng&);                                 \
  template CocycleReport validate_scalar_cocycle<T>(const ScalarCocycle<T>&);                                 \
  template bool same_class<T>(const ScalarCocycle<T>&, const ScalarCocycle<T>&);                              \
  template ScalarCocycle<T> twisted_product<T>(const ScalarCocycle<T>&, const ScalarCocycle<T>&);             \
  template CSAInvariants<T> csa_invariants<T>(const CMCocycle<T>&, Rng&);                                     \
  template std::optional<CoboundaryData<T>> find_coboundary<T>(const CMCocycle<T>&, const CMCocycle<T>&, Rng&); \
  template std::vector<std::string> check_crossed_module<T>(const AlgebraPtr<T>&, Rng&, int);                 \
  template MoritaButterfly<T> morita_butterfly<T>(const BimodulePtr<T>&, std::shared_ptr<Rng>);               \
  template CSAButterfly<T> csa_butterfly<T>(const AlgebraPtr<T>&, std::shared_ptr<Rng>);                      \
  template CMCocycle<T> transport_cocycle<T>(const MoritaButterfly<T>&, const CMCocycle<T>&,                  \
                                             const AlgebraPtr<T>&, const std::vector<MoritaElement<T>>*);     \
  template ScalarCocycle<T> transport_scalar<T>(const CSAButterfly<T>&, const CMCocycle<T>&);

S2V_INSTANTIATE(Rational)
S2V_INSTANTIATE(Gaussian)

}  // namespace super2vec
