#include <gtest/gtest.h>

#include <random>

#include "prismkit/delta.hpp"
#include "test_util.hpp"

using namespace prismkit;
using testutil::random_elem;

namespace {

constexpr int kPairs = 200;

std::vector<Prism> catalog(i64 p) {
  return {crystalline_prism(p, 6), eisenstein_prism(p, 6, 8, {-p, 1}), q_prism(p, 6, 0, 16),
          q_prism(p, 6, 1, 16)};
}

}  // namespace

TEST(Delta, CrystallineValues) {
  auto P = crystalline_prism(2, 4);
  EXPECT_EQ(delta_of(P.d).constant_term(), 15);
  auto P3 = crystalline_prism(3, 6);
  EXPECT_EQ(delta_of(P3.d), P3.A->constant(1 - 9));
  EXPECT_EQ(delta_of(P3.A->one()), P3.A->zero());
  EXPECT_EQ(delta_of(P3.A->zero()), P3.A->zero());
}

TEST(Delta, EisensteinValue) {
  auto P = eisenstein_prism(2, 4, 8, {-2, 1});
  const auto& A = P.A;
  EXPECT_EQ(delta_of(P.d), A->u().scaled(2) - A->constant(3));
  EXPECT_TRUE(is_distinguished(P.d));
  EXPECT_EQ(delta_of(A->u()), A->zero());
  EXPECT_TRUE(is_rank_one(A->u()));
}

TEST(Delta, PrecisionDropsByOne) {
  auto P = eisenstein_prism(3, 5, 6, {-3, 1});
  EXPECT_EQ(delta_of(P.d).prec(), 4);
  Elem low = P.A->u().with_prec(1);
  EXPECT_THROW(delta_of(low), Error);
}

TEST(Delta, LawsHoldInEveryCatalogRing) {
  for (i64 p : {2, 3})
    for (const auto& P : catalog(p)) {
      std::mt19937_64 rng(31 + p);
      const auto& A = P.A;
      const int g = A->N() - 1;
      for (int k = 0; k < kPairs; ++k) {
        Elem x = random_elem(A, rng), y = random_elem(A, rng);
        Elem dx = delta_of(x), dy = delta_of(y);
        Elem prod = x.pow(p) * dy + y.pow(p) * dx + (dx * dy).scaled(p);
        ASSERT_TRUE(eq_at(delta_of(x * y), prod, g)) << A->describe();
        Elem sum = dx + dy + delta_sum_correction(x, y);
        ASSERT_TRUE(eq_at(delta_of(x + y), sum, g)) << A->describe();
        ASSERT_TRUE(eq_at(x.phi(), x.pow(p), 1));
      }
    }
}

TEST(Delta, PthRootLemma) {
  auto P = eisenstein_prism(2, 6, 8, {-2, 1});
  for (int n = 0; n <= 4; ++n) EXPECT_TRUE(check_pth_root_lemma(P.A->u(), n));
  auto Z = crystalline_prism(2, 6);
  EXPECT_TRUE(check_pth_root_lemma(Z.A->constant(3), 1));
  std::mt19937_64 rng(5);
  EXPECT_TRUE(check_pth_root_lemma(random_elem(P.A, rng), 0));
}

TEST(Delta, PthRootLemmaForArbitraryElements) {
  std::mt19937_64 rng(6);
  for (i64 p : {2, 3})
    for (const auto& P : catalog(p))
      for (int k = 0; k < 20; ++k) {
        Elem x = random_elem(P.A, rng);
        for (int n = 0; n <= 4; ++n) ASSERT_TRUE(check_pth_root_lemma(x, n)) << x.str() << " n=" << n;
      }
}

TEST(Prism, Catalog) {
  for (i64 p : {2, 3}) {
    EXPECT_EQ(crystalline_prism(p, 6).kind, PrismKind::Crystalline);
    EXPECT_EQ(q_prism(p, 6, 0, 16).kind, PrismKind::QPrism);
    EXPECT_EQ(q_prism(p, 6, 2, 16).kind, PrismKind::QPrism);
    EXPECT_EQ(eisenstein_prism(p, 6, 8, {-p, 0, 1}).kind, PrismKind::Eisenstein);
  }
}

TEST(Prism, NonDistinguishedRejected) {
  RingSpec s;
  s.p = 2;
  s.N = 6;
  s.M = 8;
  auto A = Ring::make(s);
  try {
    prism_make(A, A->u() * A->u());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotDistinguished);
  }
}

TEST(Prism, PIntegerIsPModQMinusOne) {
  for (i64 p : {2, 3}) {
    auto P = q_prism(p, 6, 1, 16);
    const auto& A = P.A;
    Elem mu = A->q() - A->one();
    EXPECT_TRUE(in_ideal(P.d - A->constant(p), {mu}));
  }
}
