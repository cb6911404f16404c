#pragma once

// Working rings Z[u, q_s]/(p^N, u^M, (q_s - 1)^Q) and their elements.
// Coefficients are stored densely over monomials u^i t^j with t = q_s - 1.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prismkit/error.hpp"
#include "prismkit/zpn.hpp"

namespace prismkit {

using i64 = std::int64_t;
using json = nlohmann::json;

struct RingSpec {
  i64 p = 2;
  int N = 1;
  std::optional<int> M;      // u truncation order
  std::optional<int> depth;  // root depth s of q_s
  std::optional<int> Q;      // (q_s - 1) truncation order

  bool operator==(const RingSpec&) const = default;
};

class Elem;
class Ring;
using RingPtr = std::shared_ptr<const Ring>;

class Ring {
 public:
  static RingPtr make(const RingSpec& spec);

  const RingSpec& spec() const { return spec_; }
  i64 p() const { return spec_.p; }
  int N() const { return spec_.N; }
  i64 mod() const { return mod_; }
  bool has_u() const { return spec_.M.has_value(); }
  bool has_q() const { return spec_.Q.has_value(); }
  int depth() const { return spec_.depth.value_or(0); }
  int mu() const { return spec_.M.value_or(1); }
  int mq() const { return spec_.Q.value_or(1); }
  int dim() const { return mu() * mq(); }
  int default_cap() const { return spec_.N + spec_.M.value_or(0) + spec_.Q.value_or(0); }
  std::string describe() const;

  Elem zero() const;
  Elem one() const;
  Elem constant(i64 c) const;
  Elem u() const;
  Elem t() const;   // q_s - 1
  Elem qs() const;  // q_s
  Elem q() const;   // q_s^{p^s}
  Elem monomial(int i, int j, i64 c = 1) const;

  // Images of t^j under t -> (1+t)^p - 1.
  const std::vector<std::vector<i64>>& phi_t_powers() const { return phi_t_; }

  bool same(const Ring& o) const { return this == &o || spec_ == o.spec_; }

 private:
  explicit Ring(const RingSpec& spec);
  RingSpec spec_;
  i64 mod_;
  std::vector<std::vector<i64>> phi_t_;
  std::weak_ptr<const Ring> self_;
};

class Elem {
 public:
  Elem() = default;
  Elem(RingPtr R, std::vector<i64> coeffs, int g);

  const RingPtr& ring() const { return R_; }
  const std::vector<i64>& coeffs() const { return c_; }
  int prec() const { return g_; }
  i64 coeff(int i, int j = 0) const { return c_[std::size_t(i) * R_->mq() + j]; }
  bool valid() const { return R_ != nullptr; }

  bool is_zero() const;
  bool is_unit() const;
  i64 constant_term() const { return c_[0]; }
  // Polynomial degree in u (or t when there is no u); -1 for zero.
  int degree() const;

  Elem inv() const;
  Elem phi() const;
  Elem pow(std::uint64_t e) const;
  Elem with_prec(int g) const;
  Elem zero_like() const { return R_->zero(); }
  Elem one_like() const { return R_->one(); }

  Elem& operator+=(const Elem& o);
  Elem& operator-=(const Elem& o);
  Elem& operator*=(const Elem& o);
  friend Elem operator+(Elem a, const Elem& b) { return a += b; }
  friend Elem operator-(Elem a, const Elem& b) { return a -= b; }
  friend Elem operator*(Elem a, const Elem& b) { return a *= b; }
  Elem operator-() const;
  Elem scaled(i64 k) const;

  // Equality of representatives in the quotient ring; precision is ignored.
  bool operator==(const Elem& o) const;
  bool operator!=(const Elem& o) const { return !(*this == o); }

  std::string str() const;

 private:
  void check_same(const Elem& o) const;
  RingPtr R_;
  std::vector<i64> c_;
  int g_ = 0;
};

// a == b modulo p^g.
bool eq_at(const Elem& a, const Elem& b, int g);

// Which integer lift of the dividend is divided when b is a constant p^v*w.
// Balanced lifts reproduce quotients computed over Z for small values.
enum class Lift { NonNegative, Balanced };

// c with b*c = a. The guaranteed precision drops by the largest p-adic
// valuation among the nonzero elementary divisors of multiplication by b.
Elem div_exact(const Elem& a, const Elem& b, Lift lift = Lift::NonNegative);

struct Val {
  int k = 0;
  bool capped = false;  // a lies in (gens)^cap
  bool operator==(const Val&) const = default;
};

// Largest k <= cap with a in (gens)^k.
Val val(const Elem& a, const std::vector<Elem>& gens, std::optional<int> cap = {});

// Membership of a in the ideal generated by gens.
bool in_ideal(const Elem& a, const std::vector<Elem>& gens);

// Scalar protocol used by the generic matrix code.
inline Elem zero_like(const Elem& x) { return x.zero_like(); }
inline Elem one_like(const Elem& x) { return x.one_like(); }
inline bool is_zero(const Elem& x) { return x.is_zero(); }
inline bool is_unit(const Elem& x) { return x.is_unit(); }
inline Elem inv(const Elem& x) { return x.inv(); }
inline Elem phi(const Elem& x) { return x.phi(); }
inline i64 residue(const Elem& x) { return zpn::reduce(x.constant_term(), x.ring()->p()); }
inline std::string to_string(const Elem& x) { return x.str(); }

json spec_to_json(const RingSpec& s);
RingSpec spec_from_json(const json& j);
json to_json(const Elem& x);
Elem elem_from_json(const json& j);
// Coefficient list only, interpreted in a known ring.
Elem elem_from_json(const json& coeffs, const RingPtr& R);

// Dense coefficient vector as a Z/p^N column; used to build linear systems.
zpn::Mat multiplication_matrix(const Elem& b);

}  // namespace prismkit
