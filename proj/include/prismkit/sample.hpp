#pragma once

// Deterministic random sampling of ring elements and matrices.

#include <cstdint>
#include <random>

#include "prismkit/linalg.hpp"

namespace prismkit::sample {

// Independent stream for sample `index` of a run seeded with `seed`.
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return std::mt19937_64(z ^ (z >> 31));
}

inline Elem random_elem(const RingPtr& R, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> d(0, R->mod() - 1);
  std::vector<std::int64_t> c(R->dim());
  for (auto& x : c) x = d(rng);
  return Elem(R, c, R->N());
}

inline Elem random_unit(const RingPtr& R, std::mt19937_64& rng) {
  for (;;) {
    Elem x = random_elem(R, rng);
    if (x.is_unit()) return x;
  }
}

// Element of the maximal ideal (p, u, t).
inline Elem random_nonunit(const RingPtr& R, std::mt19937_64& rng) {
  Elem x = random_elem(R, rng);
  return x - R->constant(x.constant_term() % R->p());
}

inline EMatrix random_matrix(const RingPtr& R, int r, int c, std::mt19937_64& rng) {
  EMatrix X = ematrix(R, r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) X(i, j) = random_elem(R, rng);
  return X;
}

inline EMatrix random_invertible(const RingPtr& R, int h, std::mt19937_64& rng) {
  for (;;) {
    EMatrix X = random_matrix(R, h, h, rng);
    if (is_invertible(X, R->p())) return X;
  }
}

}  // namespace prismkit::sample
