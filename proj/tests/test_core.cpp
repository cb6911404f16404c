#include <gtest/gtest.h>

#include <random>

#include "prismkit/linalg.hpp"
#include "prismkit/ring.hpp"
#include "test_util.hpp"

using namespace prismkit;
using testutil::random_elem;

namespace {

constexpr int kTriples = 500;
constexpr int kPairs = 200;

RingPtr ring(i64 p, int N, std::optional<int> M = {}) {
  RingSpec s;
  s.p = p;
  s.N = N;
  s.M = M;
  return Ring::make(s);
}

RingPtr qring(i64 p, int N, int depth, int Q) {
  RingSpec s;
  s.p = p;
  s.N = N;
  s.depth = depth;
  s.Q = Q;
  return Ring::make(s);
}

int brute_val_pu(const Elem& a, int cap) {
  // (p,u)^k in (Z/p^N)[u]/u^M is spanned by the monomials p^i u^j with i+j >= k.
  const auto& R = a.ring();
  int v = cap;
  for (int j = 0; j < R->mu(); ++j) {
    i64 c = a.coeff(j);
    if (!c) continue;
    v = std::min(v, zpn::valuation(c, R->p(), R->N()) + j);
  }
  return v;
}

}  // namespace

TEST(RingMake, ValidSpecs) {
  auto R = ring(2, 4);
  EXPECT_EQ(R->mod(), 16);
  EXPECT_EQ(R->dim(), 1);
  auto S = ring(3, 2, 4);
  EXPECT_EQ(S->mod(), 9);
  EXPECT_EQ(S->dim(), 4);
}

TEST(RingMake, RejectsBadSpecs) {
  EXPECT_THROW(ring(2, 0), Error);
  EXPECT_THROW(ring(4, 2), Error);
  EXPECT_THROW(ring(2, 2, 0), Error);
}

TEST(Arith, Examples) {
  auto R = ring(2, 4);
  EXPECT_EQ((R->constant(9) + R->constant(9)).constant_term(), 2);
  auto S = ring(2, 2, 3);
  Elem x = S->one() + S->u();
  Elem expect = S->one() + S->u().scaled(2) + S->u() * S->u();
  EXPECT_EQ(x * x, expect);
  EXPECT_THROW(R->one() + S->one(), Error);
}

TEST(Arith, RingAxiomsHoldExactly) {
  std::mt19937_64 rng(11);
  for (auto R : {ring(2, 6, 8), ring(3, 6, 8), qring(2, 6, 1, 16), qring(3, 6, 0, 16)}) {
    for (int k = 0; k < kTriples; ++k) {
      Elem a = random_elem(R, rng), b = random_elem(R, rng), c = random_elem(R, rng);
      ASSERT_EQ((a * b) * c, a * (b * c));
      ASSERT_EQ(a * (b + c), a * b + a * c);
      ASSERT_EQ(a * b, b * a);
      ASSERT_EQ((a + b) + c, a + (b + c));
    }
  }
}

TEST(Arith, InverseOfUnit) {
  std::mt19937_64 rng(12);
  auto R = qring(3, 6, 1, 16);
  for (int k = 0; k < 50; ++k) {
    Elem a = testutil::random_unit(R, rng);
    EXPECT_EQ(a * a.inv(), R->one());
  }
}

TEST(Phi, FrobeniusLiftCongruence) {
  std::mt19937_64 rng(13);
  for (auto R : {ring(2, 6, 8), ring(3, 6, 8), qring(2, 6, 2, 16), qring(3, 4, 1, 12)}) {
    for (int k = 0; k < 100; ++k) {
      Elem a = random_elem(R, rng);
      ASSERT_TRUE(eq_at(a.phi(), a.pow(R->p()), 1));
    }
  }
}

TEST(Phi, IsRingHomomorphism) {
  std::mt19937_64 rng(14);
  auto R = qring(2, 5, 1, 10);
  for (int k = 0; k < 100; ++k) {
    Elem a = random_elem(R, rng), b = random_elem(R, rng);
    ASSERT_EQ((a * b).phi(), a.phi() * b.phi());
    ASSERT_EQ((a + b).phi(), a.phi() + b.phi());
  }
  EXPECT_EQ(R->qs().phi(), R->qs().pow(2));
}

TEST(DivExact, Examples) {
  auto R = ring(2, 4);
  Elem c = div_exact(R->constant(12), R->constant(2));
  EXPECT_EQ(c.constant_term(), 6);
  EXPECT_EQ(c.prec(), 3);

  auto S = ring(2, 3, 4);
  Elem u = S->u();
  Elem a = u * u - u.scaled(2);
  Elem b = u - S->constant(2);
  Elem q = div_exact(a, b);
  EXPECT_EQ(q * b, a);
  EXPECT_EQ(q.prec(), 3);

  EXPECT_THROW(div_exact(S->one(), u), Error);
}

TEST(DivExact, PrecisionExhausted) {
  auto R = ring(2, 2);
  Elem c = div_exact(R->constant(2), R->constant(2));
  EXPECT_EQ(c.prec(), 1);
  try {
    div_exact(c.scaled(2), R->constant(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PrecisionExhausted);
  }
}

TEST(DivExact, RecoversQuotientByRegularElement) {
  // In the finite local quotient the regular elements are the units.
  std::mt19937_64 rng(15);
  auto R = ring(2, 6, 8);
  for (int k = 0; k < kPairs; ++k) {
    Elem b = testutil::random_unit(R, rng), c = random_elem(R, rng);
    ASSERT_EQ(div_exact(b * c, b), c);
  }
}

TEST(DivExact, NonRegularDivisorGivesQuotientModAnnihilator) {
  std::mt19937_64 rng(20);
  auto R = ring(2, 6, 8);
  for (int k = 0; k < kPairs; ++k) {
    Elem b = testutil::random_nonunit(R, rng), c = random_elem(R, rng);
    Elem q = div_exact(b * c, b);
    ASSERT_EQ(q * b, b * c);
  }
}

TEST(Val, Examples) {
  auto R = ring(2, 5);
  Elem two = R->constant(2);
  EXPECT_EQ(val(R->constant(12), {two}), (Val{2, false}));
  EXPECT_TRUE(val(R->zero(), {two}).capped);
  auto S = ring(2, 3, 4);
  Elem x = S->u().scaled(2);
  EXPECT_EQ(val(x, {S->constant(2), S->u()}).k, 2);
  EXPECT_EQ(val(x, {S->constant(2), S->u()}).k, brute_val_pu(x, S->default_cap()));
}

TEST(Val, MatchesMonomialIdealOracle) {
  std::mt19937_64 rng(16);
  auto R = ring(2, 4, 5);
  std::vector<Elem> gens = {R->constant(2), R->u()};
  for (int k = 0; k < 100; ++k) {
    Elem a = random_elem(R, rng) * random_elem(R, rng) * testutil::random_nonunit(R, rng);
    Val v = val(a, gens);
    int expect = brute_val_pu(a, R->default_cap());
    if (a.is_zero()) {
      EXPECT_TRUE(v.capped);
    } else {
      EXPECT_EQ(v.k, expect) << a.str();
    }
  }
}

TEST(Val, Superadditive) {
  std::mt19937_64 rng(17);
  auto R = ring(3, 4, 6);
  std::vector<Elem> gens = {R->u() - R->constant(3)};
  const int cap = R->default_cap();
  for (int k = 0; k < kPairs; ++k) {
    Elem a = testutil::random_nonunit(R, rng) * testutil::random_nonunit(R, rng);
    Elem b = testutil::random_nonunit(R, rng);
    int va = val(a, gens).k, vb = val(b, gens).k, vab = val(a * b, gens).k;
    ASSERT_GE(vab, std::min(cap, va + vb));
  }
}

TEST(Json, RoundTrip) {
  std::mt19937_64 rng(18);
  for (auto R : {ring(2, 4, 8), qring(3, 3, 1, 6)}) {
    Elem a = random_elem(R, rng);
    json j = to_json(a);
    EXPECT_EQ(elem_from_json(j), a);
  }
  json j = to_json(ring(2, 4, 8)->u().scaled(3));
  EXPECT_EQ(j.dump(), R"({"N":4,"coeffs":[[1,3]],"g":4,"p":2,"u_trunc":8})");
}

TEST(Solve, LinearSystemOverTruncatedRing) {
  std::mt19937_64 rng(19);
  auto R = ring(2, 4, 3);
  for (int k = 0; k < 20; ++k) {
    EMatrix A = ematrix(R, 2, 2), X = ematrix(R, 2, 1);
    for (int i = 0; i < 2; ++i) {
      X(i, 0) = random_elem(R, rng);
      for (int j = 0; j < 2; ++j) A(i, j) = random_elem(R, rng);
    }
    auto sol = solve(A, A * X);
    ASSERT_TRUE(sol);
    EXPECT_EQ(A * sol->X, A * X);
  }
}
