#pragma once

// Low-degree terms of the Breen-Deligne resolution of a finite abelian group,
// cochains with values in Z/m, and the exterior-algebra primitive check.

#include <cstdint>
#include <utility>
#include <vector>

#include "prismkit/linalg.hpp"

namespace prismkit {

struct FiniteAbelianGroup {
  std::vector<i64> orders;

  explicit FiniteAbelianGroup(std::vector<i64> orders);
  i64 size() const { return n_; }
  // Elements are indexed 0..size()-1 in mixed radix, first factor fastest.
  std::vector<i64> decode(i64 x) const;
  i64 encode(const std::vector<i64>& t) const;
  i64 add(i64 a, i64 b) const { return table_[std::size_t(a) * n_ + b]; }

 private:
  i64 n_ = 1;
  std::vector<i64> table_;
};

// A function G^arity -> Z/m, tuples indexed by x_1 + |G| x_2 + |G|^2 x_3.
struct Cochain {
  int arity = 1;
  i64 m = 1;
  std::vector<i64> v;
};

Cochain zero_cochain(const FiniteAbelianGroup& G, int arity, i64 m);
i64 cochain_at(const FiniteAbelianGroup& G, const Cochain& c, const std::vector<i64>& xs);
void cochain_set(const FiniteAbelianGroup& G, Cochain& c, const std::vector<i64>& xs, i64 value);
bool is_zero(const Cochain& c);

// (d1 f)(x, y) = -f(x) + f(x + y) - f(y).
Cochain bd_d1(const FiniteAbelianGroup& G, const Cochain& f);
// (g(x, y) - g(y, x), -g(y, z) + g(x + y, z) - g(x, y + z) + g(x, y)).
std::pair<Cochain, Cochain> bd_d2(const FiniteAbelianGroup& G, const Cochain& g);

// Cyclic orders in invariant-factor form, each dividing the next.
struct ExtGroups {
  std::vector<i64> H0, H1;
};

// TooLarge when |G| > 16 or |G|^2 m > 10^6.
ExtGroups ext_groups(const FiniteAbelianGroup& G, i64 m);

// Orders of the p-primary cyclic pieces merged into invariant factors.
std::vector<i64> invariant_factors(std::vector<i64> cyclic_orders);

// Exterior algebra of F_p^r with basis e_S indexed by subset masks S.
struct PrimitiveResult {
  int r = 0;
  i64 p = 0;
  int dimension = 0;
  std::vector<std::vector<i64>> basis;
  bool equals_degree_one = false;
};

// Coefficients of mu*(x) in the basis e_S (x) e_T, indexed [S][T].
std::vector<std::vector<i64>> coproduct(const std::vector<i64>& x, int r, i64 p);
bool is_primitive(const std::vector<i64>& x, int r, i64 p);
// Enumerates all p^(2^r) elements; TooLarge beyond 10^6 of them.
PrimitiveResult primitive_elements(int r, i64 p);

json to_json(const ExtGroups& e);
json to_json(const PrimitiveResult& r);

}  // namespace prismkit
