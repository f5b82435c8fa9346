#include "super2vec/scalar.hpp"

#include <stdexcept>

namespace super2vec {

Rational::Rational(const mpz_class& num, const mpz_class& den) : v_(num, den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  v_ /= o.v_;
  return *this;
}

Rational Rational::parse(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto slash = s.find('/');
  auto check_int = [](const std::string& part) {
    size_t start = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
    if (start == part.size()) return false;
    for (size_t i = start; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!check_int(num) || !check_int(den) || den[0] == '-' || den[0] == '+')
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  if (num[0] == '+') num.erase(0, 1);
  mpz_class n(num), d(den);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(n, d);
}

std::string Rational::to_string() const {
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Gaussian& Gaussian::operator*=(const Gaussian& o) {
  Rational r = re_ * o.re_ - im_ * o.im_;
  Rational i = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

Gaussian& Gaussian::operator/=(const Gaussian& o) {
  Rational n = o.norm();
  if (n.is_zero()) throw std::domain_error("division by zero");
  *this *= o.conj();
  re_ /= n;
  im_ /= n;
  return *this;
}

std::string Gaussian::to_string() const {
  return "[" + re_.to_string() + "," + im_.to_string() + "]";
}

std::ostream& operator<<(std::ostream& os, const Rational& x) {
  if (x.is_integer()) return os << x.numerator().get_str();
  return os << x.to_string();
}

std::ostream& operator<<(std::ostream& os, const Gaussian& x) {
  if (x.im().is_zero()) return os << x.re();
  if (x.re().is_zero()) return os << x.im() << "i";
  os << "(" << x.re();
  if (x.im().sign() > 0) os << "+";
  return os << x.im() << "i)";
}

namespace {

Rational small_rational(Rng& rng, bool nonzero) {
  std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
  int n = num(rng);
  while (nonzero && n == 0) n = num(rng);
  return Rational(mpz_class(n), mpz_class(den(rng)));
}

}  // namespace

std::vector<Rational> Field<Rational>::grid_units() { return {Rational(1), Rational(-1)}; }

Rational Field<Rational>::sample(Rng& rng) { return small_rational(rng, false); }

Rational Field<Rational>::sample_nonzero(Rng& rng) { return small_rational(rng, true); }

std::optional<int> Field<Rational>::phase(const Rational& x, int m) {
  if (x.is_zero()) return std::nullopt;
  if (x.sign() > 0) return 0;
  if (m % 2 != 0) return std::nullopt;
  return m / 2;
}

Rational Field<Rational>::root_of_unity(int m, int k) {
  if (!supports_modulus(m)) throw std::invalid_argument("mu_m not contained in Q for this m");
  k = ((k % m) + m) % m;
  return (m == 2 && k == 1) ? Rational(-1) : Rational(1);
}

std::vector<Gaussian> Field<Gaussian>::grid_units() {
  return {Gaussian(1), Gaussian(-1), Gaussian::i(), -Gaussian::i()};
}

Gaussian Field<Gaussian>::sample(Rng& rng) {
  return Gaussian(small_rational(rng, false), small_rational(rng, false));
}

Gaussian Field<Gaussian>::sample_nonzero(Rng& rng) {
  Gaussian g;
  while (g.is_zero()) g = sample(rng);
  return g;
}

std::optional<int> Field<Gaussian>::phase(const Gaussian& x, int m) {
  if (x.is_zero()) return std::nullopt;
  int quarter;
  if (x.im().is_zero())
    quarter = x.re().sign() > 0 ? 0 : 2;
  else if (x.re().is_zero())
    quarter = x.im().sign() > 0 ? 1 : 3;
  else
    return std::nullopt;
  // exp(2 pi i quarter/4) = exp(2 pi i k/m) with k = quarter*m/4
  if ((quarter * m) % 4 != 0) return std::nullopt;
  return quarter * m / 4;
}

Gaussian Field<Gaussian>::root_of_unity(int m, int k) {
  if (!supports_modulus(m)) throw std::invalid_argument("mu_m not contained in Q(i) for this m");
  k = ((k % m) + m) % m;
  int quarter = k * (4 / m);
  switch (quarter) {
    case 0: return Gaussian(1);
    case 1: return Gaussian::i();
    case 2: return Gaussian(-1);
    default: return -Gaussian::i();
  }
}

std::optional<Rational> Field<Rational>::sqrt(const Rational& x) {
  if (x.sign() < 0) return std::nullopt;
  mpz_class n = x.numerator(), d = x.denominator();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  return Rational(rn, rd);
}

// (a + bi)^2 = c + di: a^2 = (c + |x|)/2 and b = d/(2a).
std::optional<Gaussian> Field<Gaussian>::sqrt(const Gaussian& x) {
  if (x.is_zero()) return Gaussian();
  auto m = Field<Rational>::sqrt(x.norm());
  if (!m) return std::nullopt;
  const Rational& c = x.re();
  const Rational& d = x.im();
  if (auto a = Field<Rational>::sqrt((c + *m) / Rational(2)); a && !a->is_zero())
    return Gaussian(*a, d / (Rational(2) * *a));
  if (auto b = Field<Rational>::sqrt((*m - c) / Rational(2)); b && !b->is_zero())
    return Gaussian(d / (Rational(2) * *b), *b);
  return std::nullopt;
}

}  // namespace super2vec
