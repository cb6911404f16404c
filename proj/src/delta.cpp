#include "prismkit/delta.hpp"

namespace prismkit {

Elem delta_of(const Elem& x) {
  const RingPtr& R = x.ring();
  if (x.prec() < 2) fail(ErrorKind::PrecisionExhausted, "delta needs precision at least 2");
  return div_exact(x.phi() - x.pow(R->p()), R->constant(R->p()), Lift::Balanced);
}

Elem delta_sum_correction(const Elem& x, const Elem& y) {
  const RingPtr& R = x.ring();
  const i64 p = R->p();
  Elem acc = R->zero();
  i64 binom = 1;
  for (i64 i = 1; i < p; ++i) {
    binom = binom * (p - i + 1) / i;
    acc -= (x.pow(i) * y.pow(p - i)).scaled(binom / p);
  }
  return acc.with_prec(std::min(x.prec(), y.prec()) - 1);
}

bool is_rank_one(const Elem& x) {
  if (x.prec() < 2) fail(ErrorKind::PrecisionExhausted, "rank-1 test needs precision at least 2");
  return x.phi() == x.pow(x.ring()->p());
}

bool is_distinguished(const Elem& x) { return delta_of(x).is_unit(); }

bool check_pth_root_lemma(const Elem& x, int n) {
  const RingPtr& R = x.ring();
  if (n < 0 || n > R->N() - 1) fail(ErrorKind::InputError, "level must lie in 0..N-1");
  Elem y = x.pow(static_cast<std::uint64_t>(zpn::ipow(R->p(), n)));
  Elem dy = delta_of(y);
  return val(dy, {R->constant(R->p())}).k >= n;
}

const char* prism_kind_name(PrismKind k) {
  switch (k) {
    case PrismKind::Crystalline: return "crystalline";
    case PrismKind::Eisenstein: return "eisenstein";
    case PrismKind::QPrism: return "q";
  }
  return "?";
}

Elem q_integer(const RingPtr& R, i64 n) {
  Elem q = R->q(), acc = R->zero(), pw = R->one();
  for (i64 i = 0; i < n; ++i) {
    acc += pw;
    pw *= q;
  }
  return acc;
}

namespace {

std::optional<std::vector<i64>> eisenstein_coeffs(const Elem& d) {
  const RingPtr& R = d.ring();
  if (!R->has_u() || R->has_q()) return std::nullopt;
  int deg = d.degree();
  if (deg < 1 || d.coeff(deg) != 1) return std::nullopt;
  const i64 p = R->p();
  std::vector<i64> c;
  for (int i = 0; i <= deg; ++i) c.push_back(d.coeff(i));
  if (R->N() >= 2 && zpn::valuation(c[0], p, R->N()) != 1) return std::nullopt;
  for (int i = 0; i < deg; ++i)
    if (c[i] % p) return std::nullopt;
  // Use balanced representatives so that the polynomial reads naturally.
  for (auto& x : c)
    if (x > R->mod() / 2) x -= R->mod();
  return c;
}

}  // namespace

Prism prism_make(const RingPtr& A, const Elem& d) {
  if (!d.ring()->same(*A)) fail(ErrorKind::RingMismatch, "d lives in another ring");
  if (!is_distinguished(d)) fail(ErrorKind::NotDistinguished, "delta(d) is not a unit: " + d.str());
  const i64 p = A->p();
  if (d == A->constant(p)) return Prism{A, d, PrismKind::Crystalline, {}};
  if (A->has_q() && !A->has_u() && d == q_integer(A, p)) return Prism{A, d, PrismKind::QPrism, {}};
  if (auto c = eisenstein_coeffs(d)) return Prism{A, d, PrismKind::Eisenstein, *c};
  fail(ErrorKind::InvalidSpec, "d is not in the prism catalog {p, Eisenstein E(u), [p]_q}");
}

Prism crystalline_prism(i64 p, int N) {
  RingSpec s;
  s.p = p;
  s.N = N;
  RingPtr A = Ring::make(s);
  return prism_make(A, A->constant(p));
}

Prism eisenstein_prism(i64 p, int N, int M, const std::vector<i64>& monic_coeffs) {
  RingSpec s;
  s.p = p;
  s.N = N;
  s.M = M;
  RingPtr A = Ring::make(s);
  if (int(monic_coeffs.size()) > M) fail(ErrorKind::InvalidSpec, "Eisenstein degree must be below M");
  Elem E = A->zero();
  for (std::size_t i = 0; i < monic_coeffs.size(); ++i) E += A->monomial(int(i), 0, monic_coeffs[i]);
  Prism P = prism_make(A, E);
  if (P.kind != PrismKind::Eisenstein) fail(ErrorKind::InvalidSpec, "not an Eisenstein polynomial");
  return P;
}

Prism q_prism(i64 p, int N, int depth, int Q) {
  RingSpec s;
  s.p = p;
  s.N = N;
  s.depth = depth;
  s.Q = Q;
  RingPtr A = Ring::make(s);
  return prism_make(A, q_integer(A, p));
}

json prism_to_json(const Prism& P) {
  json j = spec_to_json(P.A->spec());
  j["kind"] = prism_kind_name(P.kind);
  if (P.kind == PrismKind::Eisenstein) j["E"] = P.eisenstein;
  return j;
}

Prism prism_from_json(const json& j) {
  RingSpec s = spec_from_json(j);
  std::string kind;
  try {
    kind = j.at("kind").get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorKind::InputError, std::string("prism needs a kind: ") + e.what());
  }
  if (kind == "crystalline") return crystalline_prism(s.p, s.N);
  if (kind == "q") {
    if (!s.Q) fail(ErrorKind::InputError, "q prism needs q_trunc");
    return q_prism(s.p, s.N, s.depth.value_or(0), *s.Q);
  }
  if (kind == "eisenstein") {
    if (!s.M) fail(ErrorKind::InputError, "Eisenstein prism needs u_trunc");
    std::vector<i64> E;
    if (j.contains("E"))
      E = j.at("E").get<std::vector<i64>>();
    else
      E = {-s.p, 1};
    return eisenstein_prism(s.p, s.N, *s.M, E);
  }
  fail(ErrorKind::InputError, "unknown prism kind " + kind);
}

}  // namespace prismkit
