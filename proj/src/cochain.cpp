#include "super2vec/cochain.hpp"

#include <sstream>
#include <stdexcept>

namespace super2vec {

namespace {

long mod(long x, int m) {
  if (m == 0) return x;
  long r = x % m;
  return r < 0 ? r + m : r;
}

void require_same(const AbelianCochain& a, const AbelianCochain& b) {
  if (a.nerve.get() != b.nerve.get() && !(*a.nerve == *b.nerve))
    throw std::invalid_argument("cochains live on different nerves");
  if (a.modulus != b.modulus) throw std::invalid_argument("cochains have different coefficients");
}

}  // namespace

AbelianCochain AbelianCochain::zero(NervePtr nerve, int degree, int modulus) {
  AbelianCochain c;
  c.values.assign(nerve->count(degree), 0);
  c.nerve = std::move(nerve);
  c.degree = degree;
  c.modulus = modulus;
  return c;
}

void AbelianCochain::normalize() {
  for (auto& v : values) v = mod(v, modulus);
}

std::vector<mpz_class> AbelianCochain::as_integers() const {
  std::vector<mpz_class> out;
  for (long v : values) out.emplace_back(v);
  return out;
}

AbelianCochain AbelianCochain::operator+(const AbelianCochain& o) const {
  require_same(*this, o);
  if (degree != o.degree) throw std::invalid_argument("adding cochains of different degree");
  AbelianCochain r = *this;
  for (size_t i = 0; i < values.size(); ++i) r.values[i] = mod(values[i] + o.values[i], modulus);
  return r;
}

AbelianCochain AbelianCochain::operator-() const { return scaled(-1); }

AbelianCochain AbelianCochain::operator-(const AbelianCochain& o) const { return *this + (-o); }

AbelianCochain AbelianCochain::scaled(long k) const {
  AbelianCochain r = *this;
  for (auto& v : r.values) v = mod(v * k, modulus);
  return r;
}

bool AbelianCochain::operator==(const AbelianCochain& o) const {
  if (degree != o.degree || modulus != o.modulus || values.size() != o.values.size()) return false;
  for (size_t i = 0; i < values.size(); ++i)
    if (mod(values[i] - o.values[i], modulus) != 0) return false;
  return true;
}

AbelianCochain coboundary(const AbelianCochain& c) {
  AbelianCochain r = AbelianCochain::zero(c.nerve, c.degree + 1, c.modulus);
  if (c.degree + 1 > Nerve::kMaxDim) return r;
  const auto& cells = c.nerve->simplices(c.degree + 1);
  for (size_t k = 0; k < cells.size(); ++k) {
    long acc = 0;
    for (int i = 0; i <= c.degree + 1; ++i) {
      long v = c.at(face(cells[k], i));
      acc += (i % 2 == 0) ? v : -v;
    }
    r.values[k] = mod(acc, c.modulus);
  }
  return r;
}

bool is_cocycle(const AbelianCochain& c) {
  if (c.degree + 1 > Nerve::kMaxDim) return true;
  auto d = coboundary(c);
  for (long v : d.values)
    if (v != 0) return false;
  return true;
}

AbelianCochain cup_product(const AbelianCochain& a, const AbelianCochain& b) {
  require_same(a, b);
  const int p = a.degree, q = b.degree;
  AbelianCochain r = AbelianCochain::zero(a.nerve, p + q, a.modulus);
  if (p + q > Nerve::kMaxDim) return r;
  const auto& cells = a.nerve->simplices(p + q);
  for (size_t k = 0; k < cells.size(); ++k) {
    const auto& s = cells[k];
    Simplex front(s.begin(), s.begin() + p + 1), back(s.begin() + p, s.end());
    r.values[k] = mod(a.at(front) * b.at(back), a.modulus);
  }
  return r;
}

AbelianCochain reduce(const AbelianCochain& c, int modulus) {
  AbelianCochain r = c;
  r.modulus = modulus;
  r.normalize();
  return r;
}

AbelianCochain bockstein(const AbelianCochain& c) {
  if (c.modulus <= 0) throw std::invalid_argument("bockstein needs Z/m coefficients");
  AbelianCochain lift = c;
  lift.modulus = 0;
  for (auto& v : lift.values) v = mod(v, c.modulus);
  if (c.degree + 1 > c.nerve->dimension()) return AbelianCochain::zero(c.nerve, c.degree + 1, 0);
  AbelianCochain d = coboundary(lift);
  for (auto& v : d.values) {
    if (v % c.modulus != 0) throw std::invalid_argument("bockstein input is not a cocycle mod m");
    v /= c.modulus;
  }
  return d;
}

CohomologyGroup cohomology_of(const NervePtr& nerve, int modulus, int degree) {
  IntegerChainComplex cx = nerve->cochain_complex();
  // Pad with empty degrees so that top-degree queries are well defined.
  while (static_cast<int>(cx.ranks.size()) <= degree) {
    int last = cx.ranks.back();
    cx.delta.emplace_back(0, last);
    cx.ranks.push_back(0);
  }
  return cohomology(cx, modulus, degree);
}

CoboundaryVerdict coboundary_test(const AbelianCochain& c) {
  if (c.degree == 0) {
    // Only the zero 0-cochain is a coboundary.
    if (!is_cocycle(c)) return CoboundaryVerdict::NotCocycle;
    for (long v : c.values)
      if (mod(v, c.modulus) != 0) return CoboundaryVerdict::Nontrivial;
    return CoboundaryVerdict::Coboundary;
  }
  auto g = cohomology_of(c.nerve, c.modulus, c.degree);
  auto res = g.classify(c.as_integers());
  if (!res.is_cocycle) return CoboundaryVerdict::NotCocycle;
  return res.is_zero() ? CoboundaryVerdict::Coboundary : CoboundaryVerdict::Nontrivial;
}

bool same_class(const AbelianCochain& a, const AbelianCochain& b) {
  return coboundary_test(a - b) == CoboundaryVerdict::Coboundary;
}

std::optional<AbelianCochain> coboundary_preimage(const AbelianCochain& c) {
  if (c.degree == 0) {
    for (long v : c.values)
      if (mod(v, c.modulus) != 0) return std::nullopt;
    return AbelianCochain();
  }
  IntegerChainComplex cx = c.nerve->cochain_complex();
  // Above the top dimension the cochain group is zero.
  const IntMatrix d = c.degree - 1 < static_cast<int>(cx.delta.size()) ? cx.delta[c.degree - 1]
                                                                       : IntMatrix(0, c.nerve->count(c.degree - 1));
  const int n = d.rows(), k = d.cols();
  IntMatrix a(n, k + (c.modulus ? n : 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) a(i, j) = d(i, j);
    if (c.modulus) a(i, k + i) = c.modulus;
  }
  auto sol = solve_integer(a, c.as_integers());
  if (!sol) return std::nullopt;
  AbelianCochain lam = AbelianCochain::zero(c.nerve, c.degree - 1, c.modulus);
  for (int j = 0; j < k; ++j) lam.values[j] = mod((*sol)[j].get_si(), c.modulus);
  return lam;
}

std::string to_string(const AbelianCochain& c) {
  std::ostringstream os;
  const auto& cells = c.nerve->simplices(c.degree);
  bool first = true;
  os << "{";
  for (size_t i = 0; i < cells.size(); ++i) {
    if (c.values[i] == 0) continue;
    os << (first ? "" : ", ");
    first = false;
    for (size_t j = 0; j < cells[i].size(); ++j) os << (j ? "," : "") << cells[i][j];
    os << ":" << c.values[i];
  }
  os << "}";
  return os.str();
}

}  // namespace super2vec
