#pragma once

#include <random>
#include <string>
#include <vector>

#include "super2vec/bimodule.hpp"

namespace testing_support {

using namespace super2vec;

template <class T>
int label_index(const AlgebraPtr<T>& a, const std::string& l) {
  for (int i = 0; i < a->dim(); ++i)
    if (a->carrier().labels[i] == l) return i;
  return -1;
}

template <class T>
UnitElement<T> random_even_unit(const AlgebraPtr<T>& a, Rng& rng) {
  for (;;) {
    Vec<T> v = Vec<T>::Zero(a->dim());
    for (int i = 0; i < a->carrier().even; ++i) v(i) = Field<T>::sample(rng);
    if (auto u = UnitElement<T>::from(a, v)) return *u;
  }
}

// Conjugation by a random even unit, optionally composed with the parity operator.
template <class T>
AlgebraHom<T> random_automorphism(const AlgebraPtr<T>& a, Rng& rng) {
  AlgebraHom<T> f = conjugation(random_even_unit(a, rng));
  if (std::uniform_int_distribution<int>(0, 1)(rng)) f = compose(parity_operator(a), f);
  return f;
}

template <class T>
std::vector<AlgebraPtr<T>> small_algebras() {
  return {ground_field<T>(),          clifford<T>(0, 1),        clifford<T>(1, 0),
          clifford<T>(1, 1),          clifford<T>(0, 2),        dual_numbers<T>(1),
          endomorphism_algebra<T>(1, 1), endomorphism_algebra<T>(2, 0)};
}

// A random A-A bimodule built from twists, flips and sums of the regular one.
template <class T>
BimodulePtr<T> random_bimodule(const AlgebraPtr<T>& a, Rng& rng, bool allow_sum = true) {
  std::uniform_int_distribution<int> pick(0, allow_sum ? 3 : 2);
  switch (pick(rng)) {
    case 0:
      return regular_bimodule(a);
    case 1:
      return twisted_regular(random_automorphism(a, rng));
    case 2:
      return parity_flip(twisted_regular(random_automorphism(a, rng)));
    default:
      return direct_sum(random_bimodule(a, rng, false), random_bimodule(a, rng, false));
  }
}

}  // namespace testing_support
