#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "prismkit/ext_complex.hpp"
#include "test_util.hpp"

using namespace prismkit;
using testutil::expect_error;

namespace {

i64 order_of(const std::vector<i64>& inv) {
  i64 n = 1;
  for (i64 d : inv) n *= d;
  return n;
}

Cochain random_cochain(const FiniteAbelianGroup& G, int arity, i64 m, std::mt19937_64& rng) {
  Cochain c = zero_cochain(G, arity, m);
  for (auto& x : c.v) x = i64(rng() % std::uint64_t(m));
  return c;
}

// Sizes of ker d1, ker d2 and im d1 by enumerating every cochain table.
struct Counts {
  i64 ker1 = 0, ker2 = 0, im1 = 0;
};

Counts enumerate(const FiniteAbelianGroup& G, i64 m) {
  Counts c;
  std::set<std::vector<i64>> image;
  Cochain f = zero_cochain(G, 1, m);
  for (;;) {
    Cochain g = bd_d1(G, f);
    if (is_zero(g)) ++c.ker1;
    image.insert(g.v);
    std::size_t k = 0;
    while (k < f.v.size() && ++f.v[k] == m) f.v[k++] = 0;
    if (k == f.v.size()) break;
  }
  c.im1 = i64(image.size());
  Cochain g = zero_cochain(G, 2, m);
  for (;;) {
    auto [a, b] = bd_d2(G, g);
    if (is_zero(a) && is_zero(b)) ++c.ker2;
    std::size_t k = 0;
    while (k < g.v.size() && ++g.v[k] == m) g.v[k++] = 0;
    if (k == g.v.size()) break;
  }
  return c;
}

}  // namespace

TEST(ExtComplex, GroupArithmetic) {
  FiniteAbelianGroup G({2, 3});
  EXPECT_EQ(G.size(), 6);
  EXPECT_EQ(G.decode(G.encode({1, 2})), (std::vector<i64>{1, 2}));
  EXPECT_EQ(G.add(G.encode({1, 2}), G.encode({1, 2})), G.encode({0, 1}));
  expect_error(ErrorKind::InputError, [] { FiniteAbelianGroup({1}); });
}

TEST(ExtComplex, D1Examples) {
  FiniteAbelianGroup G({2});
  EXPECT_TRUE(is_zero(bd_d1(G, zero_cochain(G, 1, 2))));
  Cochain f = zero_cochain(G, 1, 2);
  f.v = {0, 1};
  Cochain g = bd_d1(G, f);
  EXPECT_EQ(cochain_at(G, g, {1, 1}), 0);
  EXPECT_EQ(cochain_at(G, g, {0, 1}), 0);

  FiniteAbelianGroup H({4, 2});
  Cochain hom = zero_cochain(H, 1, 4);
  for (i64 x = 0; x < H.size(); ++x) hom.v[x] = H.decode(x)[0] + 2 * H.decode(x)[1];
  EXPECT_TRUE(is_zero(bd_d1(H, hom)));
  Cochain sq = zero_cochain(H, 1, 4);
  for (i64 x = 0; x < H.size(); ++x) sq.v[x] = H.decode(x)[0] * H.decode(x)[0];
  EXPECT_FALSE(is_zero(bd_d1(H, sq)));
}

TEST(ExtComplex, D2Examples) {
  FiniteAbelianGroup G({2});
  Cochain g = zero_cochain(G, 2, 2);
  for (i64 x : {0, 1})
    for (i64 y : {0, 1}) cochain_set(G, g, {x, y}, x * y);
  auto [a, b] = bd_d2(G, g);
  EXPECT_TRUE(is_zero(a));
  EXPECT_EQ(cochain_at(G, b, {1, 1, 1}), 0);
  EXPECT_TRUE(is_zero(b));

  // The carry cocycle of Z/4 restricted to values in Z/2 is symmetric.
  FiniteAbelianGroup Z4({4});
  Cochain c = zero_cochain(Z4, 2, 2);
  for (i64 x = 0; x < 4; ++x)
    for (i64 y = 0; y < 4; ++y) cochain_set(Z4, c, {x, y}, x + y >= 4 ? 1 : 0);
  auto [s, t] = bd_d2(Z4, c);
  EXPECT_TRUE(is_zero(s));
  EXPECT_TRUE(is_zero(t));

  // An antisymmetric form is caught by the first component.
  FiniteAbelianGroup V({3, 3});
  Cochain w = zero_cochain(V, 2, 3);
  for (i64 x = 0; x < V.size(); ++x)
    for (i64 y = 0; y < V.size(); ++y) {
      auto a1 = V.decode(x), b1 = V.decode(y);
      cochain_set(V, w, {x, y}, a1[0] * b1[1] - a1[1] * b1[0]);
    }
  EXPECT_FALSE(is_zero(bd_d2(V, w).first));
  EXPECT_TRUE(is_zero(bd_d2(V, w).second));
}

TEST(ExtComplex, ComplexProperty) {
  std::mt19937_64 rng(31);
  std::vector<std::pair<std::vector<i64>, i64>> cases = {{{2}, 2}, {{4}, 2}, {{3}, 9}, {{2, 2}, 4}, {{6}, 5}, {{2, 3}, 12}};
  for (auto& [orders, m] : cases) {
    FiniteAbelianGroup G(orders);
    for (int k = 0; k < 100; ++k) {
      auto [a, b] = bd_d2(G, bd_d1(G, random_cochain(G, 1, m, rng)));
      EXPECT_TRUE(is_zero(a));
      EXPECT_TRUE(is_zero(b));
    }
  }
}

TEST(ExtComplex, ExtExamples) {
  ExtGroups a = ext_groups(FiniteAbelianGroup({2}), 2);
  EXPECT_EQ(a.H0, std::vector<i64>{2});
  EXPECT_EQ(a.H1, std::vector<i64>{2});
  ExtGroups b = ext_groups(FiniteAbelianGroup({2}), 3);
  EXPECT_TRUE(b.H0.empty());
  EXPECT_TRUE(b.H1.empty());
  ExtGroups c = ext_groups(FiniteAbelianGroup({4}), 2);
  EXPECT_EQ(c.H0, std::vector<i64>{2});
  EXPECT_EQ(c.H1, std::vector<i64>{2});
  ExtGroups d = ext_groups(FiniteAbelianGroup({2, 2}), 4);
  EXPECT_EQ(d.H0, (std::vector<i64>{2, 2}));
  EXPECT_EQ(d.H1, (std::vector<i64>{2, 2}));
  ExtGroups e = ext_groups(FiniteAbelianGroup({2, 3}), 6);
  EXPECT_EQ(e.H0, std::vector<i64>{6});
  EXPECT_EQ(e.H1, std::vector<i64>{6});
  expect_error(ErrorKind::TooLarge, [] { ext_groups(FiniteAbelianGroup({17}), 2); });
  expect_error(ErrorKind::TooLarge, [] { ext_groups(FiniteAbelianGroup({16}), 4000); });
}

TEST(ExtComplex, ExtMatchesGcdOracle) {
  for (i64 p : {2, 3})
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b) {
        const i64 pa = p == 2 ? (1 << a) : (a == 1 ? 3 : 9);
        const i64 pb = p == 2 ? (1 << b) : (b == 1 ? 3 : 9);
        ExtGroups e = ext_groups(FiniteAbelianGroup({pa}), pb);
        const i64 g = std::gcd(pa, pb);
        EXPECT_EQ(e.H1, std::vector<i64>{g}) << pa << " " << pb;
        EXPECT_EQ(e.H0, std::vector<i64>{g});
      }
  // Several factors: Ext^1(sum Z/a_i, Z/m) = sum Z/gcd(a_i, m).
  std::vector<std::pair<std::vector<i64>, i64>> cases = {{{2, 4}, 8}, {{3, 3}, 3}, {{2, 2, 2}, 2}, {{4, 3}, 6}, {{5}, 10}};
  for (auto& [orders, m] : cases) {
    std::vector<i64> oracle;
    for (i64 o : orders)
      if (std::gcd(o, m) > 1) oracle.push_back(std::gcd(o, m));
    ExtGroups e = ext_groups(FiniteAbelianGroup(orders), m);
    EXPECT_EQ(e.H1, invariant_factors(oracle));
    EXPECT_EQ(e.H0, invariant_factors(oracle));
  }
}

TEST(ExtComplex, ExtMatchesBruteForceCounts) {
  std::vector<std::pair<std::vector<i64>, i64>> cases = {{{2}, 2}, {{2}, 3}, {{3}, 3}, {{4}, 2}, {{2}, 4}, {{2, 2}, 2}};
  for (auto& [orders, m] : cases) {
    FiniteAbelianGroup G(orders);
    Counts c = enumerate(G, m);
    ExtGroups e = ext_groups(G, m);
    EXPECT_EQ(order_of(e.H0), c.ker1);
    EXPECT_EQ(order_of(e.H1) * c.im1, c.ker2);
  }
}

TEST(ExtComplex, InvariantFactors) {
  EXPECT_EQ(invariant_factors({2, 3}), std::vector<i64>{6});
  EXPECT_EQ(invariant_factors({4, 2, 3}), (std::vector<i64>{2, 12}));
  EXPECT_TRUE(invariant_factors({}).empty());
}

TEST(ExtComplex, PrimitiveExamples) {
  PrimitiveResult a = primitive_elements(1, 2);
  EXPECT_EQ(a.dimension, 1);
  EXPECT_EQ(a.basis, (std::vector<std::vector<i64>>{{0, 1}}));
  EXPECT_TRUE(a.equals_degree_one);
  EXPECT_EQ(primitive_elements(2, 2).dimension, 2);

  std::vector<i64> wedge = {0, 0, 0, 1};
  auto c = coproduct(wedge, 2, 3);
  EXPECT_EQ(c[1][2], 1);
  EXPECT_EQ(c[2][1], 2);  // -1 mod 3
  EXPECT_FALSE(is_primitive(wedge, 2, 3));
  EXPECT_FALSE(is_primitive(wedge, 2, 2));
  EXPECT_TRUE(is_primitive({0, 1, 2, 0}, 2, 3));
  EXPECT_FALSE(is_primitive({1, 0, 0, 0}, 2, 3));
}

TEST(ExtComplex, PrimitivesAreDegreeOne) {
  for (i64 p : {2, 3})
    for (int r = 0; r <= 3; ++r) {
      PrimitiveResult res = primitive_elements(r, p);
      EXPECT_EQ(res.dimension, r);
      EXPECT_TRUE(res.equals_degree_one) << r << " " << p;
    }
  expect_error(ErrorKind::TooLarge, [] { primitive_elements(4, 3); });
  expect_error(ErrorKind::InputError, [] { primitive_elements(2, 4); });
}
