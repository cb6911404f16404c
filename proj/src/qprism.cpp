#include "prismkit/qprism.hpp"

#include <algorithm>
#include <cstdlib>

namespace prismkit {

namespace {

using zpn::ipow;

void check_q_ring(const QContext& C, const Elem& x) {
  if (!x.ring()->same(*C.ring())) fail(ErrorKind::RingMismatch, "element outside the q-context ring");
}

Elem qs_power(const RingPtr& R, i64 c) {
  Elem base = R->qs();
  Elem r = base.pow(static_cast<std::uint64_t>(std::llabs(c)));
  return c < 0 ? r.inv() : r;
}

// Keep the coefficients of t^0..t^{Q-1}.
Elem project(const Elem& x, const RingPtr& R) {
  std::vector<i64> c(x.coeffs().begin(), x.coeffs().begin() + R->mq());
  return Elem(R, c, x.prec());
}

Elem shift_down(const Elem& x, int e) {
  const auto& c = x.coeffs();
  std::vector<i64> out(c.size(), 0);
  for (std::size_t k = e; k < c.size(); ++k) out[k - e] = c[k];
  return Elem(x.ring(), out, x.prec());
}

int vp(i64 n, i64 p) {
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

// Weierstrass degree of [n]_q in t = q_s - 1.
int weierstrass_degree(i64 n, i64 p, int s) { return int(ipow(p, s + vp(n, p)) - ipow(p, s)); }

// g with [n]_q g = f. [n]_q = Alo + t^e Ahi with Alo = 0 mod p and Ahi a unit;
// h = Ahi g solves h = (f - Alo Ahi^{-1} h) / t^e, a p-adic contraction.
Elem divide_by_q_int(const Elem& f, i64 n) {
  const RingPtr& R = f.ring();
  Elem A = q_integer(R, n);
  int e = 0;
  while (e < R->mq() && A.coeff(0, e) % R->p() == 0) ++e;
  if (e == 0) return f * A.inv();
  if (e >= R->mq()) fail(ErrorKind::PrecisionExhausted, "[n]_q has no unit coefficient at this truncation");
  std::vector<i64> lo(R->dim(), 0);
  for (int k = 0; k < e; ++k) lo[k] = A.coeff(0, k);
  Elem Alo(R, lo, R->N());
  Elem hi_inv = shift_down(A, e).inv();
  Elem P = Alo * hi_inv;
  Elem h = R->zero();
  for (int it = 0; it <= R->N(); ++it) h = shift_down(f - P * h, e);
  Elem rem = f - P * h;
  for (int k = 0; k < e; ++k)
    if (rem.coeff(0, k) != 0) fail(ErrorKind::NotDivisible, "[n]_q does not divide the numerator");
  return (hi_inv * h).with_prec(f.prec());
}

std::vector<i64> qs_exponents(const QContext& C, const Elem& x) {
  const RingPtr& R = C.ring();
  if (R->mq() == 1) return x == R->one() ? std::vector<i64>{0} : std::vector<i64>{};
  const i64 m = R->mod();
  i64 c0 = x.coeff(0, 1);
  if (c0 > m / 2) c0 -= m;
  std::vector<i64> cand;
  const i64 span = ipow(C.p, C.s) + 1;
  for (i64 k = -span; k <= span; ++k) cand.push_back(c0 + k * m);
  std::stable_sort(cand.begin(), cand.end(), [](i64 a, i64 b) { return std::llabs(a) < std::llabs(b); });
  std::vector<i64> out;
  for (i64 c : cand)
    if (qs_power(R, c) == x) out.push_back(c);
  return out;
}

QLogResult q_log_core(const QContext& C, i64 b, std::optional<int> terms, int g) {
  const RingPtr& R = C.ring();
  const i64 p = C.p;
  const int N = R->N(), Q = R->mq();
  std::vector<Elem> mu_pows = {R->one()};
  auto mu_pow = [&](int k) {
    while (int(mu_pows.size()) <= k) mu_pows.push_back(mu_pows.back() * C.mu);
    return mu_pows[k];
  };
  auto exact_vanishing = [&](int K) { return b >= 0 && K >= b; };
  auto tail_ok = [&](int K) { return exact_vanishing(K) || mu_pow(K + 1).is_zero(); };

  int K = 0;
  if (terms) {
    K = *terms;
    if (K < 0) fail(ErrorKind::InputError, "negative term count");
  } else {
    const int limit = N + Q + 2;
    while (!tail_ok(K) && K < limit) ++K;
  }
  const bool certified = tail_ok(K);

  int emax = 0;
  for (i64 n = 1; n <= K + 1; ++n) emax = std::max(emax, weierstrass_degree(n, p, C.s));
  RingSpec is = R->spec();
  is.Q = Q + emax * N;
  RingPtr Ri = Ring::make(is);

  Elem x = qs_power(Ri, b * ipow(p, C.s));
  Elem q = Ri->q(), qinv = q.inv();
  Elem prod = Ri->one(), qk = Ri->one(), qinv_k = Ri->one(), twist = Ri->one();
  Elem sum = Ri->zero(), omitted = Ri->zero();
  for (int n = 1; n <= K + 1; ++n) {
    prod *= x - qk;
    qk *= q;
    if (n > 1) {
      qinv_k *= qinv;
      twist *= qinv_k;  // q^{-n(n-1)/2}
    }
    Elem term = divide_by_q_int(prod * twist, n);
    if (n % 2 == 0) term = -term;
    if (n <= K)
      sum += term;
    else
      omitted = term;
  }

  QLogResult r;
  r.exponent = b;
  r.value = project(sum, R).with_prec(g);
  r.cert.terms = K;
  r.cert.first_omitted = K + 1;
  r.cert.omitted_term = project(omitted, R);
  r.cert.omitted_val = val(r.cert.omitted_term, {R->constant(p), C.mu});
  r.cert.exact_vanishing = exact_vanishing(K);
  r.cert.guard_digits = emax * N;
  if (!certified)
    fail(ErrorKind::TailNotNegligible, "term " + std::to_string(K + 1) + " = " + r.cert.omitted_term.str() +
                                           " and later terms are not certified to vanish");
  if (!nygaard_member(r.value, 1, C.prism))
    fail(ErrorKind::NotInUnitNygaard, "q-logarithm left the first Nygaard step");
  return r;
}

}  // namespace

QContext q_context(i64 p, int N, int depth, int Q) {
  if (depth < 0) fail(ErrorKind::InvalidSpec, "depth must be non-negative");
  QContext C;
  C.p = p;
  C.s = depth;
  C.prism = q_prism(p, N, depth, Q);
  const RingPtr& R = C.ring();
  C.qs = R->qs();
  C.q = R->q();
  C.mu = C.q - R->one();
  C.xi_tilde = C.prism.d;
  if (depth >= 1) {
    Elem q1 = C.qs.pow(static_cast<std::uint64_t>(ipow(p, depth - 1)));
    Elem acc = R->zero(), pw = R->one();
    for (i64 k = 0; k < p; ++k) {
      acc += pw;
      pw *= q1;
    }
    C.xi = acc;
  }
  return C;
}

Elem q_int(const QContext& C, i64 n) {
  if (n < 0) fail(ErrorKind::InputError, "q-integer of a negative number");
  return q_integer(C.ring(), n);
}

Elem q_factorial(const QContext& C, i64 n) {
  if (n < 0) fail(ErrorKind::InputError, "q-factorial of a negative number");
  Elem acc = C.ring()->one();
  for (i64 k = 1; k <= n; ++k) acc *= q_int(C, k);
  return acc;
}

bool nygaard_member(const Elem& x, int i, const Prism& P) {
  if (!x.ring()->same(*P.A)) fail(ErrorKind::RingMismatch, "element outside the prism ring");
  if (i < 0) fail(ErrorKind::InputError, "negative Nygaard level");
  if (i == 0) return true;
  Val v = val(x.phi(), {P.d});
  if (v.capped && i > v.k)
    fail(ErrorKind::PrecisionExhausted, "d-divisibility beyond the valuation cap is undecidable here");
  return v.k >= i;
}

std::optional<Elem> phi_inverse(const QContext& C, const Elem& x) {
  check_q_ring(C, x);
  const RingPtr& R = C.ring();
  const int Q = R->mq();
  const i64 m = R->mod();
  std::vector<std::vector<i64>> binom(Q, std::vector<i64>(Q, 0));
  for (int j = 0; j < Q; ++j) {
    binom[j][0] = 1 % m;
    for (int i = 1; i <= j; ++i) binom[j][i] = zpn::addmod(binom[j - 1][i - 1], i < j ? binom[j - 1][i] : 0, m);
  }
  // x = sum_j b_j (q_s - 1)^j = sum_i a_i q_s^i
  std::vector<i64> a(Q, 0);
  for (int j = 0; j < Q; ++j)
    for (int i = 0; i <= j; ++i) {
      i64 term = zpn::mulmod(x.coeff(0, j), binom[j][i], m);
      a[i] = (j - i) % 2 ? zpn::submod(a[i], term, m) : zpn::addmod(a[i], term, m);
    }
  Elem y = R->zero();
  for (int i = 0; i < Q; ++i) {
    if (i % C.p) {
      if (a[i]) return std::nullopt;
      continue;
    }
    y += qs_power(R, i / C.p).scaled(a[i]);
  }
  return y.with_prec(x.prec());
}

std::optional<i64> qs_exponent(const QContext& C, const Elem& x) {
  check_q_ring(C, x);
  auto all = qs_exponents(C, x);
  if (all.empty()) return std::nullopt;
  return all.front();
}

QLogResult q_log(const QContext& C, const Elem& x, std::optional<int> terms) {
  check_q_ring(C, x);
  if (!is_rank_one(x)) fail(ErrorKind::NotRankOne, "q_log needs a rank-1 input");
  if (!nygaard_member(x - C.ring()->one(), 1, C.prism))
    fail(ErrorKind::NotInUnitNygaard, "x - 1 is not in the first Nygaard step");
  const i64 ps = ipow(C.p, C.s);
  for (i64 c : qs_exponents(C, x))
    if (c % ps == 0) return q_log_core(C, c / ps, terms, x.prec());
  fail(ErrorKind::NotInUnitNygaard, "x is not an integral power of q at this truncation");
}

QLogResult q_log_qpow(const QContext& C, i64 b, std::optional<int> terms) {
  return q_log_core(C, b, terms, C.ring()->N());
}

bool frobenius_eigen_check(const QContext& C, const Elem& x) {
  Elem l = q_log(C, x).value;
  return l.phi() == C.xi_tilde * l;
}

QLogResult divided_q_log(const QContext& C, const std::vector<Elem>& roots) {
  if (roots.size() < 2) fail(ErrorKind::InputError, "a root system needs x_0 and x_1");
  for (const auto& x : roots) {
    check_q_ring(C, x);
    if (!is_rank_one(x)) fail(ErrorKind::NotRankOne, "root " + x.str() + " is not rank 1");
  }
  for (std::size_t k = 0; k + 1 < roots.size(); ++k)
    if (roots[k + 1].pow(C.p) != roots[k])
      fail(ErrorKind::IncompatibleRoots, "x_" + std::to_string(k + 1) + "^p != x_" + std::to_string(k));
  if (!in_ideal(roots[0] - C.ring()->one(), {C.prism.d}))
    fail(ErrorKind::NotInUnitNygaard, "x_0 is not congruent to 1 modulo d");
  return q_log(C, roots[1]);
}

json to_json(const QLogResult& r) {
  json j;
  j["value"] = to_json(r.value);
  j["q_exponent"] = r.exponent;
  json c;
  c["terms"] = r.cert.terms;
  c["first_omitted"] = r.cert.first_omitted;
  c["omitted_term"] = to_json(r.cert.omitted_term);
  c["omitted_valuation"] = r.cert.omitted_val.k;
  c["omitted_valuation_capped"] = r.cert.omitted_val.capped;
  c["reason"] = r.cert.exact_vanishing ? "numerator vanishes exactly" : "(q-1)^first_omitted vanishes";
  c["guard_digits"] = r.cert.guard_digits;
  j["certificate"] = c;
  return j;
}

}  // namespace prismkit
