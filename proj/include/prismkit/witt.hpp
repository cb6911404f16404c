#pragma once

// Witt vectors of finite length with structure polynomials obtained from
// the ghost recursion over Z.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "prismkit/ring.hpp"

namespace prismkit {

// Integer polynomial in at most 16 variables; exponents packed 8 bits each.
class IntPoly {
 public:
  using Key = unsigned __int128;

  IntPoly() = default;
  static IntPoly var(int v);
  static IntPoly constant(long c);

  IntPoly& operator+=(const IntPoly& o);
  IntPoly& operator-=(const IntPoly& o);
  friend IntPoly operator+(IntPoly a, const IntPoly& b) { return a += b; }
  friend IntPoly operator-(IntPoly a, const IntPoly& b) { return a -= b; }
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  IntPoly scaled(const mpz_class& k) const;
  IntPoly pow(unsigned e) const;
  // Exact division of every coefficient; aborts on a remainder.
  IntPoly divided(const mpz_class& k) const;

  static int exponent(Key k, int v) { return int((k >> (8 * v)) & 0xff); }
  const std::map<Key, mpz_class>& terms() const { return t_; }
  std::size_t size() const { return t_.size(); }

  // Human-readable form with variable names.
  std::string str(const std::vector<std::string>& names) const;

  // Evaluate at ring elements (one per variable index used).
  Elem eval(const std::vector<Elem>& vals) const;

 private:
  std::map<Key, mpz_class> t_;
};

struct WittPolys {
  std::int64_t p;
  int n;
  // Variables: x_i is index i, y_i is index n + i.
  std::vector<IntPoly> S, P;
  // Frobenius: ghost(F x)_k = ghost(x)_{k+1}; n - 1 polynomials in x.
  std::vector<IntPoly> F;
};

// Cached per (p, n); n <= 5 and p^{n-1} <= 27.
std::shared_ptr<const WittPolys> witt_structure_polys(std::int64_t p, int n);

struct WittVector {
  RingPtr R;
  std::vector<Elem> x;

  int length() const { return int(x.size()); }
};

WittVector witt_make(const RingPtr& R, const std::vector<Elem>& comps);
WittVector witt_from_ints(const RingPtr& R, const std::vector<i64>& comps);
std::vector<Elem> ghost(const WittVector& a);
WittVector witt_add(const WittVector& a, const WittVector& b);
WittVector witt_mul(const WittVector& a, const WittVector& b);
// Over F_p (N = 1, no variables) F is the componentwise p-th power and keeps
// the length; otherwise it shortens the vector by one.
WittVector witt_F(const WittVector& a);
WittVector witt_V(const WittVector& a);
// Witt vector of the integer k (image of k under Z -> W_n).
WittVector witt_integer(const RingPtr& R, int n, i64 k);

bool operator==(const WittVector& a, const WittVector& b);

json polys_to_json(const WittPolys& w);

}  // namespace prismkit
