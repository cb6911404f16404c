#pragma once

// Truncated prismatic envelope A{x/d}: generators y_1..y_K with
// y_k^p = phi^k(d) y_{k+1}, phi(y_k) = d^{p^k} y_{k+1} and
// delta(y_k) = ((d^{p^k} - phi^k(d)) / p) y_{k+1}. Here y_1 = x/d.
//
// Elements are A-combinations of monomials y_1^{e_1}...y_K^{e_K} y_{K+1}^{e}
// with e_k < p for k <= K. Terms involving y_{K+1} form the frontier: they
// are legitimate ring elements but phi and delta refuse to act on them, and
// refuse to produce them.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "prismkit/delta.hpp"

namespace prismkit {

class EnvRing;
using EnvRingPtr = std::shared_ptr<const EnvRing>;

class EnvRing {
 public:
  // Relations imposed for k = 1..depth; y_{depth+1} is free.
  static EnvRingPtr make(const Prism& P, const Elem& x, int depth);

  i64 p() const { return p_; }
  int depth() const { return D_; }
  const Prism& prism() const { return P_; }
  const RingPtr& base() const { return P_.A; }
  const Elem& x() const { return x_; }
  const Elem& d() const { return P_.d; }
  const Elem& phi_k_d(int k) const { return phikd_.at(k); }  // phi^k(d), k = 0..depth+1
  const Elem& d_pow(int k) const { return dpow_.at(k); }     // d^{p^k}, k = 0..depth+1
  const Elem& delta_coeff(int k) const { return ck_.at(k); } // k = 1..depth+1
  // Ring one level deeper, used to evaluate delta.
  const EnvRingPtr& deeper() const { return deeper_; }

  std::vector<int> exponents(i64 key) const;
  i64 key(const std::vector<int>& e) const;
  bool is_frontier(i64 key) const { return key >= frontier_; }
  i64 frontier_key() const { return frontier_; }

  // Product of two monomials: normalized key and the A-coefficient produced by
  // the rewriting y_k^p -> phi^k(d) y_{k+1}.
  std::pair<i64, Elem> mono_mul(i64 a, i64 b) const;

  std::string describe() const;

 private:
  EnvRing() = default;
  static EnvRingPtr build(const Prism& P, const Elem& x, int depth, EnvRingPtr deeper);
  i64 p_ = 2;
  int D_ = 1;
  i64 frontier_ = 0;
  Prism P_;
  Elem x_;
  std::vector<Elem> phikd_, dpow_, ck_;
  EnvRingPtr deeper_;
};

class EnvElem {
 public:
  EnvElem() = default;
  explicit EnvElem(EnvRingPtr R) : R_(std::move(R)) {}
  static EnvElem constant(const EnvRingPtr& R, const Elem& a);
  static EnvElem gen(const EnvRingPtr& R, int k);  // y_k
  static EnvElem term(const EnvRingPtr& R, const std::vector<int>& e, const Elem& a);

  const EnvRingPtr& ring() const { return R_; }
  const std::map<i64, Elem>& terms() const { return t_; }
  Elem constant_part() const;
  bool is_zero() const { return t_.empty(); }
  bool is_unit() const;
  bool has_frontier() const;

  EnvElem& operator+=(const EnvElem& o);
  EnvElem& operator-=(const EnvElem& o);
  EnvElem& operator*=(const EnvElem& o);
  friend EnvElem operator+(EnvElem a, const EnvElem& b) { return a += b; }
  friend EnvElem operator-(EnvElem a, const EnvElem& b) { return a -= b; }
  friend EnvElem operator*(const EnvElem& a, const EnvElem& b);
  EnvElem operator-() const;
  EnvElem scaled(const Elem& a) const;
  EnvElem scaled(i64 k) const;
  EnvElem pow(unsigned e) const;
  EnvElem inv() const;
  EnvElem zero_like() const { return EnvElem(R_); }
  EnvElem one_like() const { return constant(R_, R_->base()->one()); }

  bool operator==(const EnvElem& o) const;
  bool operator!=(const EnvElem& o) const { return !(*this == o); }

  // Same monomial keys in another envelope ring; fails on terms that do not fit.
  EnvElem moved_to(const EnvRingPtr& R) const;

  std::string str() const;

 private:
  void add_term(i64 key, const Elem& c);
  EnvRingPtr R_;
  std::map<i64, Elem> t_;
};

EnvElem envelope_phi(const EnvElem& e);
EnvElem envelope_delta(const EnvElem& e);
// phi/d on the ideal generated by the y's (no constant part).
EnvElem envelope_phi1(const EnvElem& e);

inline EnvElem zero_like(const EnvElem& x) { return x.zero_like(); }
inline EnvElem one_like(const EnvElem& x) { return x.one_like(); }
inline bool is_zero(const EnvElem& x) { return x.is_zero(); }
inline bool is_unit(const EnvElem& x) { return x.is_unit(); }
inline EnvElem inv(const EnvElem& x) { return x.inv(); }
inline EnvElem phi(const EnvElem& x) { return envelope_phi(x); }
inline i64 residue(const EnvElem& x) { return prismkit::residue(x.constant_part()); }
inline std::string to_string(const EnvElem& x) { return x.str(); }

struct Envelope {
  EnvRingPtr R;
  int K = 1;
  EnvElem y(int k) const { return EnvElem::gen(R, k); }
  EnvElem lift(const Elem& a) const { return EnvElem::constant(R, a); }
};

Envelope envelope_build(const Prism& P, const Elem& x, int K);

struct NilStep {
  int k = 1;              // generator y_k
  int m = 1;              // power of phi_1
  i64 d_exponent = 0;     // phi_1^m(y_k) = d^{d_exponent} w y_{k+m}
  i64 bound = 0;          // p^{k+m-1} - 1
  Val base_val;           // valuation of the coefficient in A for (d)
  bool verified = false;  // recomputed independently and d-divisibility consistent
};

struct NilpotenceCertificate {
  int target = 0;
  int m = 0;
  std::vector<NilStep> trace;
};

// Smallest m with d-valuation of phi_1^m(y_k) >= target for every k with
// k + m <= K, together with the full trace for m = 1..K-1.
NilpotenceCertificate nilpotence_certify(const Envelope& E, int target);
NilpotenceCertificate nilpotence_certify(const Prism& P, const Elem& x, int K, int target);

json envelope_to_json(const Envelope& E);
json to_json(const EnvElem& e);
json to_json(const NilpotenceCertificate& c);

}  // namespace prismkit
