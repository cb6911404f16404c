#pragma once

// delta-structures attached to the Frobenius lifts of the working rings, and
// the oriented prism catalog.

#include <vector>

#include "prismkit/ring.hpp"

namespace prismkit {

// delta(x) = (phi(x) - x^p) / p.
Elem delta_of(const Elem& x);

// Additive correction (x^p + y^p - (x+y)^p) / p, computed without division.
Elem delta_sum_correction(const Elem& x, const Elem& y);

bool is_rank_one(const Elem& x);
bool is_distinguished(const Elem& x);

// val(delta(x^{p^n}), (p)) >= n.
bool check_pth_root_lemma(const Elem& x, int n);

enum class PrismKind { Crystalline, Eisenstein, QPrism };

const char* prism_kind_name(PrismKind k);

struct Prism {
  RingPtr A;
  Elem d;
  PrismKind kind;
  // Monic Eisenstein polynomial, coefficients from degree 0 upward.
  std::vector<i64> eisenstein;
};

// Verifies that d is distinguished and that it belongs to the catalog.
Prism prism_make(const RingPtr& A, const Elem& d);

Prism crystalline_prism(i64 p, int N);
Prism eisenstein_prism(i64 p, int N, int M, const std::vector<i64>& monic_coeffs);
Prism q_prism(i64 p, int N, int depth, int Q);

// [n]_q in a ring with a q variable.
Elem q_integer(const RingPtr& R, i64 n);

json prism_to_json(const Prism& P);
Prism prism_from_json(const json& j);

}  // namespace prismkit
