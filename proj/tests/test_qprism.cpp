#include <gtest/gtest.h>

#include <random>

#include "prismkit/qprism.hpp"

using namespace prismkit;

namespace {

struct Ctx {
  i64 p;
  int N, s, Q;
};

const Ctx kContexts[] = {{2, 6, 0, 16}, {2, 6, 1, 16}, {3, 6, 0, 16}, {3, 6, 1, 16}, {2, 4, 2, 12}};

Elem qpow(const QContext& C, i64 b) {
  Elem r = C.q.pow(std::uint64_t(std::llabs(b)));
  return b < 0 ? r.inv() : r;
}

void expect_error(ErrorKind k, const std::function<void()>& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << kind_name(k);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), k) << e.what();
  }
}

}  // namespace

TEST(QContext, StructuralElements) {
  for (const auto& c : kContexts) {
    QContext C = q_context(c.p, c.N, c.s, c.Q);
    const RingPtr& R = C.ring();
    EXPECT_TRUE(in_ideal(C.xi_tilde - R->constant(c.p), {C.mu}));
    EXPECT_EQ(C.q.pow(c.p) - R->one(), C.mu * C.xi_tilde);
    EXPECT_EQ(C.q, C.qs.pow(std::uint64_t(zpn::ipow(c.p, c.s))));
    if (c.s >= 1) {
      ASSERT_TRUE(C.xi.has_value());
      EXPECT_EQ(C.xi->phi(), C.xi_tilde);
      auto back = phi_inverse(C, C.xi_tilde);
      ASSERT_TRUE(back.has_value());
      EXPECT_EQ(*back, *C.xi);
    } else {
      EXPECT_FALSE(C.xi.has_value());
    }
  }
}

TEST(QContext, PhiInverseRejectsNonPowersOfQsP) {
  QContext C = q_context(2, 4, 1, 8);
  EXPECT_FALSE(phi_inverse(C, C.qs).has_value());
  auto y = phi_inverse(C, C.qs.pow(6));
  ASSERT_TRUE(y.has_value());
  EXPECT_EQ(*y, C.qs.pow(3));
}

TEST(QInt, Examples) {
  QContext C = q_context(2, 4, 0, 8);
  EXPECT_EQ(q_factorial(C, 2), C.ring()->one() + C.q);
  EXPECT_EQ(q_int(C, 0), C.ring()->zero());
  EXPECT_EQ(q_factorial(C, 0), C.ring()->one());
  for (i64 n = 0; n < 12; ++n) EXPECT_EQ(q_int(C, n).constant_term(), n % 16);
  EXPECT_THROW(q_int(C, -1), Error);
}

TEST(QInt, CyclotomicFactorisation) {
  for (const auto& c : kContexts) {
    QContext C = q_context(c.p, c.N, c.s, c.Q);
    for (i64 n = 0; n <= 3 * c.p; ++n)
      EXPECT_EQ(C.q.pow(n) - C.ring()->one(), C.mu * q_int(C, n)) << "n=" << n;
    EXPECT_TRUE(in_ideal(q_int(C, c.p) - C.ring()->constant(c.p), {C.mu}));
    if (C.xi) {
      Elem q1 = C.qs.pow(std::uint64_t(zpn::ipow(c.p, c.s - 1)));
      EXPECT_TRUE(in_ideal(*C.xi - C.ring()->constant(c.p), {q1 - C.ring()->one()}));
    }
  }
}

TEST(Nygaard, Examples) {
  QContext C = q_context(2, 4, 1, 12);
  const RingPtr& R = C.ring();
  EXPECT_TRUE(nygaard_member(C.mu, 1, C.prism));
  EXPECT_FALSE(nygaard_member(R->one(), 1, C.prism));
  EXPECT_TRUE(nygaard_member(*C.xi, 1, C.prism));
  EXPECT_TRUE(nygaard_member(R->one(), 0, C.prism));
  EXPECT_TRUE(nygaard_member(C.mu * C.mu, 2, C.prism));
  EXPECT_FALSE(nygaard_member(C.qs - R->one(), 1, C.prism));
  expect_error(ErrorKind::PrecisionExhausted, [&] { nygaard_member(R->zero(), 1000, C.prism); });
}

TEST(QLog, Examples) {
  for (const auto& c : kContexts) {
    QContext C = q_context(c.p, c.N, c.s, c.Q);
    const RingPtr& R = C.ring();
    EXPECT_TRUE(q_log(C, R->one()).value.is_zero());
    auto r0 = q_log(C, R->one(), 0);
    EXPECT_TRUE(r0.value.is_zero());
    EXPECT_TRUE(r0.cert.exact_vanishing);
    EXPECT_EQ(r0.cert.first_omitted, 1);
    EXPECT_EQ(q_log(C, C.q).value, C.mu);
  }
}

TEST(QLog, Errors) {
  QContext C = q_context(2, 6, 1, 16);
  const RingPtr& R = C.ring();
  expect_error(ErrorKind::NotRankOne, [&] { q_log(C, R->constant(3)); });
  expect_error(ErrorKind::NotInUnitNygaard, [&] { q_log(C, C.qs); });
  expect_error(ErrorKind::TailNotNegligible, [&] { q_log(C, C.q.inv(), 1); });
}

TEST(QLog, PowersOfQMatchTheLogarithmOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<i64> pick(-40, 40);
  int checked = 0;
  for (const auto& c : kContexts) {
    QContext C = q_context(c.p, c.N, c.s, c.Q);
    for (int k = 0; k < 20; ++k) {
      i64 b = pick(rng);
      auto r = q_log(C, qpow(C, b));
      EXPECT_EQ(qpow(C, r.exponent), qpow(C, b));
      EXPECT_EQ(r.value, C.mu.scaled(b)) << "b=" << b;
      EXPECT_TRUE(nygaard_member(r.value, 1, C.prism));
      EXPECT_TRUE(r.cert.omitted_term.is_zero());
      auto rq = q_log_qpow(C, b);
      EXPECT_EQ(rq.value, r.value);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 100);
}

TEST(QLog, FrobeniusEigenRelation) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<i64> pick(-60, 60);
  for (i64 p : {2, 3}) {
    QContext C = q_context(p, 6, 1, 16);
    EXPECT_TRUE(frobenius_eigen_check(C, C.q));
    EXPECT_TRUE(frobenius_eigen_check(C, C.ring()->one()));
    for (int k = 0; k < 50; ++k) EXPECT_TRUE(frobenius_eigen_check(C, qpow(C, pick(rng))));
  }
}

TEST(QLog, ExponentRecovery) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<i64> pick(-30, 30);
  QContext C = q_context(3, 4, 1, 10);
  for (int k = 0; k < 30; ++k) {
    i64 c = pick(rng);
    Elem x = C.qs.pow(std::uint64_t(std::llabs(c)));
    if (c < 0) x = x.inv();
    auto e = qs_exponent(C, x);
    ASSERT_TRUE(e.has_value());
    EXPECT_EQ(*e, c);
  }
  EXPECT_FALSE(qs_exponent(C, C.ring()->constant(2)).has_value());
}

TEST(DividedQLog, Examples) {
  QContext C = q_context(2, 6, 1, 16);
  const RingPtr& R = C.ring();
  EXPECT_TRUE(divided_q_log(C, {R->one(), R->one(), R->one()}).value.is_zero());
  EXPECT_EQ(divided_q_log(C, {C.q.pow(2), C.q, C.qs}).value, C.mu);
  expect_error(ErrorKind::NotInUnitNygaard, [&] { divided_q_log(C, {C.q, C.qs}); });
  expect_error(ErrorKind::IncompatibleRoots, [&] { divided_q_log(C, {C.q, C.q}); });
  auto r = divided_q_log(C, {C.q.pow(8), C.q.pow(4), C.q.pow(2)});
  EXPECT_EQ(r.value, C.mu.scaled(4));
}

TEST(QLog, JsonCertificate) {
  QContext C = q_context(2, 4, 0, 8);
  json j = to_json(q_log(C, C.q.pow(3)));
  EXPECT_EQ(j["q_exponent"], 3);
  EXPECT_EQ(j["certificate"]["first_omitted"], j["certificate"]["terms"].get<int>() + 1);
  EXPECT_TRUE(j["certificate"]["omitted_valuation_capped"].get<bool>());
}
