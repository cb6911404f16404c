#pragma once

// The q-deformation ring Z_p[[q_s - 1]] at root depth s: q-integers, the
// Nygaard filtration and the q-logarithm.

#include <optional>
#include <vector>

#include "prismkit/delta.hpp"

namespace prismkit {

struct QContext {
  i64 p = 2;
  int s = 0;
  Prism prism;  // d = [p]_q
  Elem qs, q, mu, xi_tilde;
  std::optional<Elem> xi;  // [p]_{q_1} with q_1 = q_s^{p^{s-1}}, when s >= 1

  const RingPtr& ring() const { return prism.A; }
};

QContext q_context(i64 p, int N, int depth, int Q);

// [n]_q = 1 + q + ... + q^{n-1}, and [n]_q! = [1]_q ... [n]_q.
Elem q_int(const QContext& C, i64 n);
Elem q_factorial(const QContext& C, i64 n);

// phi(x) in (d)^i.
bool nygaard_member(const Elem& x, int i, const Prism& P);

// Inverse Frobenius on elements that are polynomials in q_s^p of degree < Q;
// nullopt when x is not of that form.
std::optional<Elem> phi_inverse(const QContext& C, const Elem& x);

// The exponent c with x = q_s^c in the working ring, smallest |c| first;
// nullopt when x is not a power of q_s.
std::optional<i64> qs_exponent(const QContext& C, const Elem& x);

struct QLogCertificate {
  int terms = 0;          // summed terms n = 1..terms
  int first_omitted = 1;  // index of the first omitted term
  Elem omitted_term;      // its value in the working ring
  Val omitted_val;        // its valuation for the ideal (p, q-1)
  // Either the numerator of every omitted term is exactly zero, or
  // (q-1)^{first_omitted} vanishes in the working ring.
  bool exact_vanishing = false;
  int guard_digits = 0;   // extra (q_s - 1)-adic digits used for division by [n]_q
};

struct QLogResult {
  Elem value;
  i64 exponent = 0;  // x = q^exponent
  QLogCertificate cert;
};

// log_q(x) = sum_{n>=1} (-1)^{n-1} q^{-n(n-1)/2} (x-1)(x-q)...(x-q^{n-1}) / [n]_q.
// The number of terms defaults to the smallest count whose tail is certified.
QLogResult q_log(const QContext& C, const Elem& x, std::optional<int> terms = {});
QLogResult q_log_qpow(const QContext& C, i64 b, std::optional<int> terms = {});

// phi(log_q x) == [p]_q log_q x.
bool frobenius_eigen_check(const QContext& C, const Elem& x);

// q_log of x_1 for a compatible system x_0, x_1, ... with x_{k+1}^p = x_k.
QLogResult divided_q_log(const QContext& C, const std::vector<Elem>& roots);

json to_json(const QLogResult& r);

}  // namespace prismkit
