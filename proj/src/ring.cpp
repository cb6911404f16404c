#include "prismkit/ring.hpp"

#include <algorithm>
#include <sstream>

namespace prismkit {

using zpn::addmod;
using zpn::mulmod;
using zpn::reduce;
using zpn::submod;

namespace {

constexpr int kMaxDim = 1 << 14;

void validate(const RingSpec& s) {
  if (s.p < 2 || !zpn::is_prime(s.p)) fail(ErrorKind::InvalidSpec, "p must be prime");
  if (s.N < 1) fail(ErrorKind::InvalidSpec, "N must be at least 1");
  long double bound = 1;
  for (int i = 0; i < s.N; ++i) bound *= static_cast<long double>(s.p);
  if (bound > 4.0e18L) fail(ErrorKind::InvalidSpec, "p^N exceeds 62 bits");
  if (s.M && *s.M < 1) fail(ErrorKind::InvalidSpec, "M must be at least 1");
  if (s.Q.has_value() != s.depth.has_value())
    fail(ErrorKind::InvalidSpec, "q variable needs both depth and Q");
  if (s.Q && *s.Q < 1) fail(ErrorKind::InvalidSpec, "Q must be at least 1");
  if (s.depth && *s.depth < 0) fail(ErrorKind::InvalidSpec, "depth must be non-negative");
  if (s.M.value_or(1) * s.Q.value_or(1) > kMaxDim)
    fail(ErrorKind::InvalidSpec, "ring too large");
}

}  // namespace

Ring::Ring(const RingSpec& spec) : spec_(spec), mod_(zpn::ipow(spec.p, spec.N)) {
  if (has_q()) {
    const int Q = mq();
    // T = (1+t)^p - 1
    std::vector<i64> T(Q, 0);
    {
      i64 b = 1;
      for (int k = 1; k <= spec.p && k < Q; ++k) {
        b = b * (spec.p - k + 1) / k;
        T[k] = reduce(b, mod_);
      }
    }
    phi_t_.assign(Q, std::vector<i64>(Q, 0));
    phi_t_[0][0] = 1 % mod_;
    for (int j = 1; j < Q; ++j) {
      auto& out = phi_t_[j];
      const auto& prev = phi_t_[j - 1];
      for (int a = 0; a < Q; ++a) {
        if (!prev[a]) continue;
        for (int b2 = 1; a + b2 < Q; ++b2)
          if (T[b2]) out[a + b2] = addmod(out[a + b2], mulmod(prev[a], T[b2], mod_), mod_);
      }
    }
  }
}

RingPtr Ring::make(const RingSpec& spec) {
  validate(spec);
  std::shared_ptr<Ring> r(new Ring(spec));
  r->self_ = r;
  return r;
}

std::string Ring::describe() const {
  std::ostringstream os;
  os << "(Z/" << spec_.p << "^" << spec_.N << ")";
  if (has_u()) os << "[u]/u^" << mu();
  if (has_q()) os << "[q" << depth() << "]/(q" << depth() << "-1)^" << mq();
  return os.str();
}

Elem Ring::zero() const { return Elem(self_.lock(), std::vector<i64>(dim(), 0), N()); }

Elem Ring::one() const { return constant(1); }

Elem Ring::constant(i64 c) const {
  std::vector<i64> v(dim(), 0);
  v[0] = reduce(c, mod_);
  return Elem(self_.lock(), std::move(v), N());
}

Elem Ring::monomial(int i, int j, i64 c) const {
  std::vector<i64> v(dim(), 0);
  if (i < mu() && j < mq()) v[std::size_t(i) * mq() + j] = reduce(c, mod_);
  return Elem(self_.lock(), std::move(v), N());
}

Elem Ring::u() const {
  if (!has_u()) fail(ErrorKind::InvalidSpec, "ring has no u variable");
  return monomial(1, 0);
}

Elem Ring::t() const {
  if (!has_q()) fail(ErrorKind::InvalidSpec, "ring has no q variable");
  return monomial(0, 1);
}

Elem Ring::qs() const { return one() + t(); }

Elem Ring::q() const { return qs().pow(static_cast<std::uint64_t>(zpn::ipow(p(), depth()))); }

Elem::Elem(RingPtr R, std::vector<i64> coeffs, int g) : R_(std::move(R)), c_(std::move(coeffs)), g_(g) {
  for (auto& x : c_) x = reduce(x, R_->mod());
  g_ = std::min(g_, R_->N());
}

void Elem::check_same(const Elem& o) const {
  if (!R_ || !o.R_ || !R_->same(*o.R_)) fail(ErrorKind::RingMismatch, "elements live in different rings");
}

bool Elem::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](i64 x) { return x == 0; });
}

bool Elem::is_unit() const { return c_[0] % R_->p() != 0; }

int Elem::degree() const {
  for (int k = int(c_.size()) - 1; k >= 0; --k)
    if (c_[k]) return k;
  return -1;
}

Elem& Elem::operator+=(const Elem& o) {
  check_same(o);
  const i64 m = R_->mod();
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] = addmod(c_[k], o.c_[k], m);
  g_ = std::min(g_, o.g_);
  return *this;
}

Elem& Elem::operator-=(const Elem& o) {
  check_same(o);
  const i64 m = R_->mod();
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] = submod(c_[k], o.c_[k], m);
  g_ = std::min(g_, o.g_);
  return *this;
}

Elem Elem::operator-() const {
  Elem r = *this;
  const i64 m = R_->mod();
  for (auto& x : r.c_) x = x ? m - x : 0;
  return r;
}

Elem Elem::scaled(i64 k) const {
  Elem r = *this;
  const i64 m = R_->mod();
  const i64 kk = reduce(k, m);
  for (auto& x : r.c_) x = mulmod(x, kk, m);
  return r;
}

Elem& Elem::operator*=(const Elem& o) {
  check_same(o);
  const int M = R_->mu(), Q = R_->mq();
  const i64 m = R_->mod();
  std::vector<i64> out(c_.size(), 0);
  const bool small = static_cast<long double>(m) * m * (M * Q) < 9.0e18L;
  if (small) {
    std::vector<i64> acc(c_.size(), 0);
    for (int i1 = 0; i1 < M; ++i1)
      for (int j1 = 0; j1 < Q; ++j1) {
        i64 a = c_[std::size_t(i1) * Q + j1];
        if (!a) continue;
        for (int i2 = 0; i1 + i2 < M; ++i2) {
          const i64* brow = &o.c_[std::size_t(i2) * Q];
          i64* orow = &acc[std::size_t(i1 + i2) * Q + j1];
          for (int j2 = 0; j1 + j2 < Q; ++j2) orow[j2] += a * brow[j2];
        }
      }
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = acc[k] % m;
  } else {
    for (int i1 = 0; i1 < M; ++i1)
      for (int j1 = 0; j1 < Q; ++j1) {
        i64 a = c_[std::size_t(i1) * Q + j1];
        if (!a) continue;
        for (int i2 = 0; i1 + i2 < M; ++i2)
          for (int j2 = 0; j1 + j2 < Q; ++j2) {
            i64 b = o.c_[std::size_t(i2) * Q + j2];
            if (!b) continue;
            i64& dst = out[std::size_t(i1 + i2) * Q + j1 + j2];
            dst = addmod(dst, mulmod(a, b, m), m);
          }
      }
  }
  c_ = std::move(out);
  g_ = std::min(g_, o.g_);
  return *this;
}

Elem Elem::pow(std::uint64_t e) const {
  Elem r = R_->one().with_prec(g_);
  Elem b = *this;
  while (e) {
    if (e & 1) r *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return r;
}

Elem Elem::with_prec(int g) const {
  Elem r = *this;
  r.g_ = std::min(g, R_->N());
  return r;
}

Elem Elem::inv() const {
  if (!is_unit()) fail(ErrorKind::NotDivisible, "element is not a unit");
  const i64 m = R_->mod();
  Elem x = R_->constant(zpn::inverse(c_[0], m));
  const Elem two = R_->constant(2);
  // Newton iteration doubles the (p, u, t)-adic accuracy each round.
  for (int it = 0; it < 64; ++it) {
    Elem ax = *this * x;
    if (ax == R_->one()) {
      x.g_ = g_;
      return x;
    }
    x = x * (two - ax);
  }
  fail(ErrorKind::NotDivisible, "inverse did not converge");
}

Elem Elem::phi() const {
  const int M = R_->mu(), Q = R_->mq();
  const i64 p = R_->p(), m = R_->mod();
  std::vector<i64> out(c_.size(), 0);
  if (!R_->has_q()) {
    for (int i = 0; i * p < M; ++i) out[std::size_t(i * p) * Q] = c_[std::size_t(i) * Q];
  } else {
    const auto& T = R_->phi_t_powers();
    for (int i = 0; i * p < M; ++i)
      for (int j = 0; j < Q; ++j) {
        i64 a = c_[std::size_t(i) * Q + j];
        if (!a) continue;
        i64* row = &out[std::size_t(i * p) * Q];
        for (int k = j; k < Q; ++k)
          if (T[j][k]) row[k] = addmod(row[k], mulmod(a, T[j][k], m), m);
      }
  }
  return Elem(R_, std::move(out), g_);
}

bool Elem::operator==(const Elem& o) const {
  check_same(o);
  return c_ == o.c_;
}

std::string Elem::str() const {
  std::ostringstream os;
  bool first = true;
  const int Q = R_->mq();
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (!c_[k]) continue;
    int i = int(k) / Q, j = int(k) % Q;
    if (!first) os << " + ";
    first = false;
    os << c_[k];
    if (i) os << "*u^" << i;
    if (j) os << "*t^" << j;
  }
  if (first) os << "0";
  return os.str();
}

bool eq_at(const Elem& a, const Elem& b, int g) {
  if (!a.ring()->same(*b.ring())) fail(ErrorKind::RingMismatch, "elements live in different rings");
  const i64 pg = zpn::ipow(a.ring()->p(), std::min(g, a.ring()->N()));
  for (std::size_t k = 0; k < a.coeffs().size(); ++k)
    if ((a.coeffs()[k] - b.coeffs()[k]) % pg) return false;
  return true;
}

zpn::Mat multiplication_matrix(const Elem& b) {
  const RingPtr& R = b.ring();
  const int D = R->dim();
  zpn::Mat A(D, D);
  for (int k = 0; k < D; ++k) {
    std::vector<i64> e(D, 0);
    e[k] = 1;
    Elem col = b * Elem(R, e, R->N());
    for (int i = 0; i < D; ++i) A(i, k) = col.coeffs()[i];
  }
  return A;
}

Elem div_exact(const Elem& a, const Elem& b, Lift lift) {
  if (!a.ring()->same(*b.ring())) fail(ErrorKind::RingMismatch, "elements live in different rings");
  const RingPtr& R = a.ring();
  const int g0 = std::min(a.prec(), b.prec());
  if (b.is_unit()) return (a * b.inv()).with_prec(g0);
  if (b.is_zero()) {
    if (a.is_zero()) fail(ErrorKind::PrecisionExhausted, "0/0 carries no information");
    fail(ErrorKind::NotDivisible, "division by zero");
  }
  const i64 p = R->p(), m = R->mod();
  int loss = 0;
  std::vector<i64> c;
  if (b.degree() == 0) {
    i64 b0 = b.constant_term();
    int v = zpn::valuation(b0, p, R->N());
    i64 pv = zpn::ipow(p, v);
    i64 winv = zpn::inverse(b0 / pv, m);
    c.resize(a.coeffs().size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      i64 x = a.coeffs()[k];
      if (x % pv) fail(ErrorKind::NotDivisible, "coefficient not divisible by " + std::to_string(b0));
      if (lift == Lift::Balanced && x > m / 2) x -= m;
      c[k] = mulmod(reduce(x / pv, m), winv, m);
    }
    loss = v;
  } else {
    zpn::Smith S = zpn::smith(multiplication_matrix(b), p, R->N());
    auto sol = S.solve(a.coeffs());
    if (!sol) fail(ErrorKind::NotDivisible, a.str() + " is not divisible by " + b.str());
    c = std::move(*sol);
    loss = S.max_exp();
  }
  int g = g0 - loss;
  if (g < 1) fail(ErrorKind::PrecisionExhausted, "division would exhaust p-adic precision");
  return Elem(R, std::move(c), g);
}

namespace {

zpn::Mat columns_of(const std::vector<Elem>& xs, int D) {
  zpn::Mat A(D, int(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k)
    for (int i = 0; i < D; ++i) A(i, int(k)) = xs[k].coeffs()[i];
  return A;
}

// Z/p^N-module basis of the ideal generated by xs.
std::vector<Elem> ideal_basis(const std::vector<Elem>& xs, const RingPtr& R) {
  const int D = R->dim();
  std::vector<Elem> span;
  for (const auto& x : xs)
    for (int i = 0; i < R->mu(); ++i)
      for (int j = 0; j < R->mq(); ++j) span.push_back(x * R->monomial(i, j));
  zpn::Mat B = zpn::span_basis(columns_of(span, D), R->p(), R->N());
  std::vector<Elem> out;
  for (int k = 0; k < B.c; ++k) {
    std::vector<i64> v(D);
    for (int i = 0; i < D; ++i) v[i] = B(i, k);
    out.emplace_back(R, std::move(v), R->N());
  }
  return out;
}

bool in_span(const Elem& a, const std::vector<Elem>& basis) {
  if (a.is_zero()) return true;
  if (basis.empty()) return false;
  const RingPtr& R = a.ring();
  zpn::Smith S = zpn::smith(columns_of(basis, R->dim()), R->p(), R->N(), {.U = true, .V = false});
  // Only solvability matters; V is not needed for that.
  const i64 m = R->mod();
  std::vector<i64> c = zpn::apply(S.U, a.coeffs(), m);
  for (int i = 0; i < S.rank; ++i)
    if (c[i] % zpn::ipow(R->p(), S.exps[i])) return false;
  for (int i = S.rank; i < int(c.size()); ++i)
    if (c[i]) return false;
  return true;
}

bool is_constant_p(const Elem& g) {
  return g.degree() == 0 && g.constant_term() == g.ring()->p() % g.ring()->mod();
}

}  // namespace

bool in_ideal(const Elem& a, const std::vector<Elem>& gens) {
  if (a.is_zero()) return true;
  for (const auto& g : gens)
    if (g.is_unit()) return true;
  return in_span(a, ideal_basis(gens, a.ring()));
}

Val val(const Elem& a, const std::vector<Elem>& gens, std::optional<int> cap) {
  const RingPtr& R = a.ring();
  const int C = cap.value_or(R->default_cap());
  if (a.is_zero()) return {C, true};
  for (const auto& g : gens)
    if (!g.ring()->same(*R)) fail(ErrorKind::RingMismatch, "generator in a different ring");
  if (gens.size() == 1 && is_constant_p(gens[0])) {
    int v = R->N();
    for (i64 x : a.coeffs())
      if (x) v = std::min(v, zpn::valuation(x, R->p(), R->N()));
    return v >= C ? Val{C, true} : Val{v, false};
  }
  std::vector<Elem> level = {R->one()};
  for (int k = 1; k <= C; ++k) {
    std::vector<Elem> prods;
    for (const auto& g : gens)
      for (const auto& b : level) prods.push_back(g * b);
    level = ideal_basis(prods, R);
    if (!in_span(a, level)) return {k - 1, false};
  }
  return {C, true};
}

json spec_to_json(const RingSpec& s) {
  json j;
  j["p"] = s.p;
  j["N"] = s.N;
  if (s.M) j["u_trunc"] = *s.M;
  if (s.Q) {
    j["q_depth"] = s.depth.value_or(0);
    j["q_trunc"] = *s.Q;
  }
  return j;
}

RingSpec spec_from_json(const json& j) {
  RingSpec s;
  try {
    s.p = j.at("p").get<i64>();
    s.N = j.at("N").get<int>();
    if (j.contains("u_trunc")) s.M = j.at("u_trunc").get<int>();
    if (j.contains("q_trunc")) {
      s.Q = j.at("q_trunc").get<int>();
      s.depth = j.value("q_depth", 0);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::InputError, std::string("bad ring spec: ") + e.what());
  }
  return s;
}

json to_json(const Elem& x) {
  const RingPtr& R = x.ring();
  json j = spec_to_json(R->spec());
  const int Q = R->mq();
  const bool two_vars = R->has_u() && R->has_q();
  struct Term {
    int i, j;
    i64 c;
  };
  std::vector<Term> terms;
  for (std::size_t k = 0; k < x.coeffs().size(); ++k)
    if (x.coeffs()[k]) terms.push_back({int(k) / Q, int(k) % Q, x.coeffs()[k]});
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    if (a.i + a.j != b.i + b.j) return a.i + a.j < b.i + b.j;
    return a.i > b.i;
  });
  json cs = json::array();
  for (const auto& t : terms) {
    json mono = two_vars ? json::array({t.i, t.j}) : json(R->has_q() ? t.j : t.i);
    cs.push_back(json::array({mono, t.c}));
  }
  j["coeffs"] = cs;
  j["g"] = x.prec();
  return j;
}

Elem elem_from_json(const json& coeffs, const RingPtr& R) {
  std::vector<i64> v(R->dim(), 0);
  const int Q = R->mq();
  try {
    if (coeffs.is_number_integer()) {
      v[0] = coeffs.get<i64>();
      return Elem(R, v, R->N());
    }
    for (const auto& term : coeffs) {
      const json& mono = term.at(0);
      i64 c = term.at(1).get<i64>();
      int i = 0, jj = 0;
      if (mono.is_array()) {
        i = mono.at(0).get<int>();
        jj = mono.at(1).get<int>();
      } else if (R->has_q() && !R->has_u()) {
        jj = mono.get<int>();
      } else {
        i = mono.get<int>();
      }
      if (i < 0 || jj < 0) fail(ErrorKind::InputError, "negative monomial exponent");
      if (i >= R->mu() || jj >= Q) continue;
      i64& dst = v[std::size_t(i) * Q + jj];
      dst = zpn::addmod(dst, zpn::reduce(c, R->mod()), R->mod());
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::InputError, std::string("bad coefficient list: ") + e.what());
  }
  return Elem(R, std::move(v), R->N());
}

Elem elem_from_json(const json& j) {
  RingPtr R = Ring::make(spec_from_json(j));
  if (!j.contains("coeffs")) fail(ErrorKind::InputError, "element JSON needs coeffs");
  Elem x = elem_from_json(j.at("coeffs"), R);
  if (j.contains("g")) {
    int g = j.at("g").get<int>();
    if (g < 1) fail(ErrorKind::InputError, "precision must be positive");
    x = x.with_prec(g);
  }
  return x;
}

}  // namespace prismkit
