#include "prismkit/envelope.hpp"

#include <sstream>

namespace prismkit {

EnvRingPtr EnvRing::build(const Prism& P, const Elem& x, int D, EnvRingPtr deeper) {
  std::shared_ptr<EnvRing> R(new EnvRing());
  R->p_ = P.A->p();
  R->D_ = D;
  R->P_ = P;
  R->x_ = x;
  R->frontier_ = zpn::ipow(R->p_, D);
  R->deeper_ = std::move(deeper);
  const RingPtr& A = P.A;
  R->phikd_.push_back(P.d);
  R->dpow_.push_back(P.d);
  for (int k = 1; k <= D + 1; ++k) {
    R->phikd_.push_back(R->phikd_.back().phi());
    R->dpow_.push_back(R->dpow_.back().pow(static_cast<std::uint64_t>(R->p_)));
  }
  R->ck_.push_back(A->zero());
  for (int k = 1; k <= D + 1; ++k) {
    Elem diff = R->dpow_[k] - R->phikd_[k];
    Elem c;
    try {
      c = div_exact(diff, A->constant(R->p_), Lift::Balanced);
    } catch (const Error& e) {
      fail(ErrorKind::PrecisionExhausted, std::string("delta table division failed: ") + e.what());
    }
    if (c.scaled(R->p_) != diff) fail(ErrorKind::PrecisionExhausted, "delta table coefficient is not exact");
    R->ck_.push_back(c);
  }
  return R;
}

EnvRingPtr EnvRing::make(const Prism& P, const Elem& x, int depth) {
  if (depth < 1) fail(ErrorKind::InputError, "envelope depth must be at least 1");
  if (!x.ring()->same(*P.A)) fail(ErrorKind::RingMismatch, "x lives outside the prism ring");
  if (!is_rank_one(x)) fail(ErrorKind::NotRankOne, "x = " + x.str() + " is not of rank 1");
  return build(P, x, depth, build(P, x, depth + 1, nullptr));
}

std::vector<int> EnvRing::exponents(i64 key) const {
  std::vector<int> e(D_ + 1, 0);
  for (int k = 0; k < D_; ++k) {
    e[k] = int(key % p_);
    key /= p_;
  }
  e[D_] = int(key);
  return e;
}

i64 EnvRing::key(const std::vector<int>& e) const {
  i64 k = 0, w = 1;
  for (int i = 0; i < D_; ++i) {
    if (e[i] < 0 || e[i] >= p_) fail(ErrorKind::InputError, "monomial is not in normal form");
    k += e[i] * w;
    w *= p_;
  }
  return k + i64(e[D_]) * w;
}

std::pair<i64, Elem> EnvRing::mono_mul(i64 a, i64 b) const {
  std::vector<int> ea = exponents(a), eb = exponents(b);
  for (int i = 0; i <= D_; ++i) ea[i] += eb[i];
  Elem c = base()->one();
  for (int i = 0; i < D_; ++i)
    while (ea[i] >= p_) {
      ea[i] -= int(p_);
      ea[i + 1] += 1;
      c *= phikd_[i + 1];
    }
  return {key(ea), c};
}

std::string EnvRing::describe() const {
  std::ostringstream os;
  os << "envelope over " << base()->describe() << " with d = " << d().str() << ", depth " << D_;
  return os.str();
}

EnvElem EnvElem::constant(const EnvRingPtr& R, const Elem& a) {
  EnvElem e(R);
  e.add_term(0, a);
  return e;
}

EnvElem EnvElem::gen(const EnvRingPtr& R, int k) {
  if (k < 1 || k > R->depth() + 1) fail(ErrorKind::InputError, "generator index out of range");
  std::vector<int> ex(R->depth() + 1, 0);
  ex[k - 1] = 1;
  EnvElem e(R);
  e.add_term(R->key(ex), R->base()->one());
  return e;
}

EnvElem EnvElem::term(const EnvRingPtr& R, const std::vector<int>& e, const Elem& a) {
  if (int(e.size()) != R->depth() + 1) fail(ErrorKind::InputError, "exponent vector has the wrong length");
  // Normalize exponents through multiplication by generators.
  EnvElem out = constant(R, a);
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i]) out *= gen(R, int(i) + 1).pow(unsigned(e[i]));
  return out;
}

void EnvElem::add_term(i64 key, const Elem& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = t_.try_emplace(key, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) t_.erase(it);
  }
}

Elem EnvElem::constant_part() const {
  auto it = t_.find(0);
  return it == t_.end() ? R_->base()->zero() : it->second;
}

bool EnvElem::is_unit() const { return constant_part().is_unit(); }

bool EnvElem::has_frontier() const {
  return !t_.empty() && R_->is_frontier(t_.rbegin()->first);
}

EnvElem& EnvElem::operator+=(const EnvElem& o) {
  for (const auto& [k, c] : o.t_) add_term(k, c);
  return *this;
}

EnvElem& EnvElem::operator-=(const EnvElem& o) {
  for (const auto& [k, c] : o.t_) add_term(k, -c);
  return *this;
}

EnvElem operator*(const EnvElem& a, const EnvElem& b) {
  EnvElem out(a.R_);
  for (const auto& [ka, ca] : a.t_)
    for (const auto& [kb, cb] : b.t_) {
      if (ka == 0) {
        out.add_term(kb, ca * cb);
        continue;
      }
      if (kb == 0) {
        out.add_term(ka, ca * cb);
        continue;
      }
      auto [k, c] = a.R_->mono_mul(ka, kb);
      out.add_term(k, ca * cb * c);
    }
  return out;
}

EnvElem& EnvElem::operator*=(const EnvElem& o) { return *this = *this * o; }

EnvElem EnvElem::operator-() const {
  EnvElem out(R_);
  for (const auto& [k, c] : t_) out.t_.emplace(k, -c);
  return out;
}

EnvElem EnvElem::scaled(const Elem& a) const {
  EnvElem out(R_);
  for (const auto& [k, c] : t_) out.add_term(k, c * a);
  return out;
}

EnvElem EnvElem::scaled(i64 k) const { return scaled(R_->base()->constant(k)); }

EnvElem EnvElem::pow(unsigned e) const {
  EnvElem r = one_like(), b = *this;
  while (e) {
    if (e & 1) r *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return r;
}

EnvElem EnvElem::inv() const {
  Elem c = constant_part();
  if (!c.is_unit()) fail(ErrorKind::NotDivisible, "envelope element is not a unit");
  Elem ci = c.inv();
  EnvElem n = scaled(ci) - one_like();
  EnvElem acc = one_like(), pw = one_like();
  for (int i = 0; i < 4096; ++i) {
    pw = -(pw * n);
    if (pw.is_zero()) return acc.scaled(ci);
    acc += pw;
  }
  fail(ErrorKind::NotDivisible, "inverse series does not terminate below the frontier");
}

bool EnvElem::operator==(const EnvElem& o) const {
  if (t_.size() != o.t_.size()) return false;
  for (auto a = t_.begin(), b = o.t_.begin(); a != t_.end(); ++a, ++b)
    if (a->first != b->first || a->second != b->second) return false;
  return true;
}

EnvElem EnvElem::moved_to(const EnvRingPtr& R) const {
  EnvElem out(R);
  for (const auto& [k, c] : t_) {
    std::vector<int> e = R_->exponents(k);
    e.resize(std::max<std::size_t>(e.size(), R->depth() + 1), 0);
    for (std::size_t i = R->depth() + 1; i < e.size(); ++i)
      if (e[i]) fail(ErrorKind::FrontierExceeded, "term reaches beyond y_" + std::to_string(R->depth() + 1));
    e.resize(R->depth() + 1);
    for (int i = 0; i < R->depth(); ++i)
      if (e[i] >= R->p()) fail(ErrorKind::FrontierExceeded, "term is not reduced at this depth");
    out.add_term(R->key(e), c);
  }
  return out;
}

std::string EnvElem::str() const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
    os << (first ? "" : " + ") << "(" << it->second.str() << ")";
    first = false;
    std::vector<int> e = R_->exponents(it->first);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!e[i]) continue;
      os << "*y" << i + 1;
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

namespace {

// Shift y_k -> y_{k+1} with coefficient phi(a) d^{w - drop}, w = sum p^k e_k.
EnvElem frobenius_like(const EnvElem& e, int drop, const char* what) {
  const EnvRingPtr& R = e.ring();
  const int D = R->depth();
  EnvElem out(R);
  for (const auto& [key, a] : e.terms()) {
    std::vector<int> ex = R->exponents(key);
    if (ex[D] > 0) fail(ErrorKind::FrontierExceeded, std::string(what) + " of a term involving y_" + std::to_string(D + 1));
    std::uint64_t w = 0;
    for (int k = 1; k <= D; ++k) w += std::uint64_t(zpn::ipow(R->p(), k)) * ex[k - 1];
    if (drop && w == 0) fail(ErrorKind::InputError, std::string(what) + " needs an element of the ideal of the y's");
    Elem c = a.phi() * R->d().pow(w - drop);
    std::vector<int> sh(D + 1, 0);
    for (int k = 0; k < D; ++k) sh[k + 1] = ex[k];
    if (sh[D] > 0) {
      if (!c.is_zero())
        fail(ErrorKind::FrontierExceeded, std::string(what) + " reaches y_" + std::to_string(D + 1));
      continue;
    }
    out += EnvElem::term(R, sh, c);
  }
  return out;
}

EnvElem delta_gen(const EnvRingPtr& R, int k) {
  if (k > R->depth()) fail(ErrorKind::FrontierExceeded, "delta(y_" + std::to_string(k) + ") needs a deeper presentation");
  return EnvElem::gen(R, k + 1).scaled(R->delta_coeff(k));
}

// delta(u v) = u^p delta(v) + v^p delta(u) + p delta(u) delta(v)
EnvElem delta_product(const EnvElem& u, const EnvElem& du, const EnvElem& v, const EnvElem& dv) {
  const unsigned p = unsigned(u.ring()->p());
  return u.pow(p) * dv + v.pow(p) * du + (du * dv).scaled(u.ring()->p());
}

// (s^p + t^p - (s+t)^p) / p
EnvElem sum_correction(const EnvElem& s, const EnvElem& t) {
  const i64 p = s.ring()->p();
  EnvElem acc = s.zero_like();
  i64 binom = 1;
  for (i64 i = 1; i < p; ++i) {
    binom = binom * (p - i + 1) / i;
    acc -= (s.pow(unsigned(i)) * t.pow(unsigned(p - i))).scaled(binom / p);
  }
  return acc;
}

EnvElem delta_in(const EnvElem& e) {
  const EnvRingPtr& R = e.ring();
  EnvElem sum(R), dsum(R);
  bool first = true;
  for (const auto& [key, a] : e.terms()) {
    EnvElem term_e(R), dterm(R);
    EnvElem ca = EnvElem::constant(R, a);
    EnvElem dca = EnvElem::constant(R, delta_of(a));
    if (key == 0) {
      term_e = ca;
      dterm = dca;
    } else {
      std::vector<int> ex = R->exponents(key);
      EnvElem m = EnvElem::constant(R, R->base()->one());
      EnvElem dm(R);
      for (std::size_t i = 0; i < ex.size(); ++i)
        for (int r = 0; r < ex[i]; ++r) {
          EnvElem g = EnvElem::gen(R, int(i) + 1), dg = delta_gen(R, int(i) + 1);
          dm = delta_product(m, dm, g, dg);
          m *= g;
        }
      term_e = ca * m;
      dterm = delta_product(ca, dca, m, dm);
    }
    if (first) {
      sum = term_e;
      dsum = dterm;
      first = false;
    } else {
      dsum = dsum + dterm + sum_correction(sum, term_e);
      sum += term_e;
    }
  }
  return dsum;
}

}  // namespace

EnvElem envelope_phi(const EnvElem& e) { return frobenius_like(e, 0, "phi"); }

EnvElem envelope_phi1(const EnvElem& e) { return frobenius_like(e, 1, "phi_1"); }

EnvElem envelope_delta(const EnvElem& e) {
  const EnvRingPtr& R = e.ring();
  if (e.has_frontier()) fail(ErrorKind::FrontierExceeded, "delta of a frontier term");
  if (!R->deeper()) fail(ErrorKind::FrontierExceeded, "delta needs a presentation one level deeper");
  EnvElem dl = delta_in(e.moved_to(R->deeper())).moved_to(R);
  if (dl.has_frontier()) fail(ErrorKind::FrontierExceeded, "delta reaches y_" + std::to_string(R->depth() + 1));
  return dl;
}

Envelope envelope_build(const Prism& P, const Elem& x, int K) { return Envelope{EnvRing::make(P, x, K), K}; }

NilpotenceCertificate nilpotence_certify(const Envelope& E, int target) {
  const EnvRingPtr& R = E.R;
  const RingPtr& A = R->base();
  const i64 p = R->p();
  if (target > A->default_cap())
    fail(ErrorKind::PrecisionExhausted, "target valuation exceeds the working cap " + std::to_string(A->default_cap()));
  NilpotenceCertificate cert;
  cert.target = target;
  cert.m = -1;
  if (target <= 0) cert.m = 0;
  for (int m = 1; m < E.K; ++m) {
    bool all = true;
    for (int k = 1; k + m <= E.K; ++k) {
      NilStep st;
      st.k = k;
      st.m = m;
      st.bound = zpn::ipow(p, k + m - 1) - 1;
      st.d_exponent = st.bound;
      EnvElem v = E.y(k);
      bool consistent = true;
      for (int j = 0; j < m; ++j) {
        EnvElem next = envelope_phi1(v);
        if (envelope_phi(v) != next.scaled(R->d())) consistent = false;
        v = next;
      }
      // Expected: d^{p^{k+m-1}-1} prod_{j<m-1} phi^{m-1-j}(d)^{p^{k+j}-1} y_{k+m}
      Elem w = A->one();
      for (int j = 0; j + 1 < m; ++j)
        w *= R->phi_k_d(m - 1 - j).pow(std::uint64_t(zpn::ipow(p, k + j) - 1));
      Elem coef = R->d().pow(std::uint64_t(st.d_exponent)) * w;
      EnvElem expect = E.y(k + m).scaled(coef);
      st.base_val = val(coef, {R->d()});
      st.verified = consistent && v == expect &&
                    (st.base_val.capped || st.base_val.k >= std::min<i64>(st.d_exponent, A->default_cap()));
      if (st.d_exponent < target) all = false;
      cert.trace.push_back(st);
    }
    if (all && cert.m < 0) cert.m = m;
  }
  if (cert.m < 0)
    fail(ErrorKind::PrecisionExhausted, "no power of phi_1 below depth " + std::to_string(E.K) + " reaches the target");
  return cert;
}

NilpotenceCertificate nilpotence_certify(const Prism& P, const Elem& x, int K, int target) {
  return nilpotence_certify(envelope_build(P, x, K), target);
}

json to_json(const EnvElem& e) {
  json terms = json::array();
  const EnvRingPtr& R = e.ring();
  for (const auto& [key, c] : e.terms()) {
    std::vector<int> ex = R->exponents(key);
    terms.push_back({{"y", ex}, {"coeff", to_json(c)}});
  }
  return {{"depth", R->depth()}, {"terms", terms}};
}

json envelope_to_json(const Envelope& E) {
  const EnvRingPtr& R = E.R;
  json j;
  j["prism"] = prism_to_json(R->prism());
  j["x"] = to_json(R->x());
  j["d"] = to_json(R->d());
  j["depth"] = E.K;
  json rel = json::array();
  rel.push_back({{"lhs", "x"}, {"rhs", "d*y1"}});
  for (int k = 1; k < E.K; ++k)
    rel.push_back({{"lhs", "y" + std::to_string(k) + "^" + std::to_string(R->p())},
                   {"rhs", "phi^" + std::to_string(k) + "(d)*y" + std::to_string(k + 1)},
                   {"coeff", to_json(R->phi_k_d(k))}});
  j["relations"] = rel;
  json dt = json::array(), pt = json::array();
  for (int k = 1; k < E.K; ++k) {
    dt.push_back({{"gen", "y" + std::to_string(k)},
                  {"coeff", to_json(R->delta_coeff(k))},
                  {"times", "y" + std::to_string(k + 1)}});
    pt.push_back({{"gen", "y" + std::to_string(k)},
                  {"d_power", zpn::ipow(R->p(), k)},
                  {"times", "y" + std::to_string(k + 1)}});
  }
  j["delta_table"] = dt;
  j["phi_table"] = pt;
  return j;
}

json to_json(const NilpotenceCertificate& c) {
  json j;
  j["target"] = c.target;
  j["m"] = c.m;
  json tr = json::array();
  for (const auto& s : c.trace)
    tr.push_back({{"k", s.k},
                  {"m", s.m},
                  {"d_exponent", s.d_exponent},
                  {"bound", s.bound},
                  {"base_val", s.base_val.k},
                  {"base_val_capped", s.base_val.capped},
                  {"verified", s.verified}});
  j["trace"] = tr;
  return j;
}

}  // namespace prismkit
