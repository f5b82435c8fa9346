#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace super2vec {

using Rng = std::mt19937_64;

class Rational {
 public:
  Rational() = default;
  Rational(int v) : v_(v) {}
  Rational(long v) : v_(v) {}
  Rational(const mpz_class& num, const mpz_class& den);
  explicit Rational(const mpq_class& v) : v_(v) { v_.canonicalize(); }

  static Rational parse(std::string_view text);

  const mpq_class& value() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_one() const { return v_ == 1; }
  int sign() const { return sgn(v_); }
  bool is_integer() const { return v_.get_den() == 1; }
  std::string to_string() const;

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const { return Rational(mpq_class(-v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }

 private:
  mpq_class v_;
};

class Gaussian {
 public:
  Gaussian() = default;
  Gaussian(int v) : re_(v) {}
  Gaussian(long v) : re_(v) {}
  Gaussian(Rational re) : re_(std::move(re)) {}
  Gaussian(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static Gaussian i() { return Gaussian(Rational(0), Rational(1)); }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  bool is_one() const { return re_.is_one() && im_.is_zero(); }
  Gaussian conj() const { return Gaussian(re_, -im_); }
  Rational norm() const { return re_ * re_ + im_ * im_; }
  std::string to_string() const;

  Gaussian& operator+=(const Gaussian& o) { re_ += o.re_; im_ += o.im_; return *this; }
  Gaussian& operator-=(const Gaussian& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
  Gaussian& operator*=(const Gaussian& o);
  Gaussian& operator/=(const Gaussian& o);

  friend Gaussian operator+(Gaussian a, const Gaussian& b) { return a += b; }
  friend Gaussian operator-(Gaussian a, const Gaussian& b) { return a -= b; }
  friend Gaussian operator*(Gaussian a, const Gaussian& b) { return a *= b; }
  friend Gaussian operator/(Gaussian a, const Gaussian& b) { return a /= b; }
  Gaussian operator-() const { return Gaussian(-re_, -im_); }

  friend bool operator==(const Gaussian& a, const Gaussian& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
  friend bool operator!=(const Gaussian& a, const Gaussian& b) { return !(a == b); }

 private:
  Rational re_;
  Rational im_;
};

std::ostream& operator<<(std::ostream& os, const Rational& x);
std::ostream& operator<<(std::ostream& os, const Gaussian& x);

inline bool is_zero(const Rational& x) { return x.is_zero(); }
inline bool is_zero(const Gaussian& x) { return x.is_zero(); }

// Per-field constants and helpers used by the search and phase routines.
template <class T>
struct Field;

template <>
struct Field<Rational> {
  static constexpr const char* tag = "Q";
  static constexpr int default_modulus = 2;
  static std::vector<Rational> grid_units();
  static Rational sample(Rng& rng);
  static Rational sample_nonzero(Rng& rng);
  // Exponent k with x/|x| = exp(2 pi i k/m), if x/|x| is an m-th root of unity.
  static std::optional<int> phase(const Rational& x, int m);
  static Rational root_of_unity(int m, int k);
  static bool supports_modulus(int m) { return m == 1 || m == 2; }
  static std::optional<Rational> sqrt(const Rational& x);
};

template <>
struct Field<Gaussian> {
  static constexpr const char* tag = "Q(i)";
  static constexpr int default_modulus = 4;
  static std::vector<Gaussian> grid_units();
  static Gaussian sample(Rng& rng);
  static Gaussian sample_nonzero(Rng& rng);
  static std::optional<int> phase(const Gaussian& x, int m);
  static Gaussian root_of_unity(int m, int k);
  static bool supports_modulus(int m) { return m == 1 || m == 2 || m == 4; }
  static std::optional<Gaussian> sqrt(const Gaussian& x);
};

}  // namespace super2vec

namespace Eigen {

template <>
struct NumTraits<super2vec::Rational> : GenericNumTraits<super2vec::Rational> {
  typedef super2vec::Rational Real;
  typedef super2vec::Rational NonInteger;
  typedef super2vec::Rational Nested;
  typedef super2vec::Rational Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 8,
    MulCost = 16
  };
  static Real epsilon() { return Real(0); }
  static Real dummy_precision() { return Real(0); }
  static int digits10() { return 0; }
};

template <>
struct NumTraits<super2vec::Gaussian> : GenericNumTraits<super2vec::Gaussian> {
  typedef super2vec::Gaussian Real;
  typedef super2vec::Gaussian NonInteger;
  typedef super2vec::Gaussian Nested;
  typedef super2vec::Gaussian Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 16,
    MulCost = 64
  };
  static Real epsilon() { return Real(0); }
  static Real dummy_precision() { return Real(0); }
  static int digits10() { return 0; }
};

}  // namespace Eigen
