#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "super2vec/integer.hpp"
#include "super2vec/nerve.hpp"

namespace super2vec {

// Cochain on a nerve with coefficients in Z (modulus 0) or Z/m.
struct AbelianCochain {
  NervePtr nerve;
  int degree = 0;
  int modulus = 0;
  std::vector<long> values;

  static AbelianCochain zero(NervePtr nerve, int degree, int modulus);

  long at(const Simplex& s) const { return values.at(nerve->index_of(s)); }
  long& at(const Simplex& s) { return values.at(nerve->index_of(s)); }
  void normalize();
  std::vector<mpz_class> as_integers() const;

  AbelianCochain operator+(const AbelianCochain& o) const;
  AbelianCochain operator-(const AbelianCochain& o) const;
  AbelianCochain operator-() const;
  AbelianCochain scaled(long k) const;
  bool operator==(const AbelianCochain& o) const;
};

AbelianCochain coboundary(const AbelianCochain& c);
bool is_cocycle(const AbelianCochain& c);
// Alexander-Whitney cup product on ordered simplices.
AbelianCochain cup_product(const AbelianCochain& a, const AbelianCochain& b);
// Connecting map for 0 -> Z -> Z -> Z/m -> 0.
AbelianCochain bockstein(const AbelianCochain& c);
// Reduction of an integer cochain modulo m.
AbelianCochain reduce(const AbelianCochain& c, int modulus);

CohomologyGroup cohomology_of(const NervePtr& nerve, int modulus, int degree);

// Decides whether c is a coboundary; cochains that are not cocycles are
// reported separately.
enum class CoboundaryVerdict { NotCocycle, Coboundary, Nontrivial };
CoboundaryVerdict coboundary_test(const AbelianCochain& c);
bool same_class(const AbelianCochain& a, const AbelianCochain& b);
// lambda of degree n-1 with c = d(lambda), when one exists.
std::optional<AbelianCochain> coboundary_preimage(const AbelianCochain& c);

std::string to_string(const AbelianCochain& c);

}  // namespace super2vec
