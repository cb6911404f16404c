#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "prismkit/envelope.hpp"
#include "test_util.hpp"

using namespace prismkit;

namespace {

void expect_error(ErrorKind k, const std::function<void()>& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << kind_name(k);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), k) << e.what();
  }
}

bool env_eq_at(const EnvElem& a, const EnvElem& b, int g) {
  EnvElem d = a - b;
  for (const auto& [k, c] : d.terms())
    if (!eq_at(c, c.zero_like(), g)) return false;
  return true;
}

Prism bk_prism(i64 p, int N, int M) { return eisenstein_prism(p, N, M, {-p, 1}); }

// A-combination of monomials of total degree <= 2 in y_1..y_top.
EnvElem random_env(const Envelope& E, int top, std::mt19937_64& rng) {
  const RingPtr& A = E.R->base();
  EnvElem e = E.lift(testutil::random_elem(A, rng));
  for (int i = 1; i <= top; ++i) {
    e += E.y(i).scaled(testutil::random_elem(A, rng));
    for (int j = i; j <= top; ++j) e += (E.y(i) * E.y(j)).scaled(testutil::random_elem(A, rng));
  }
  return e;
}

}  // namespace

TEST(Envelope, PresentationExample) {
  Prism P = bk_prism(2, 4, 8);
  const RingPtr& A = P.A;
  Envelope E = envelope_build(P, A->u(), 2);
  Elem u = A->u();
  EXPECT_EQ(E.R->phi_k_d(1), u * u - A->constant(2));
  EXPECT_EQ(E.y(1).pow(2), E.y(2).scaled(u * u - A->constant(2)));
  Elem dE = delta_of(P.d);
  EXPECT_EQ(dE, u.scaled(2) - A->constant(3));
  // delta(y_1) = ((d^p - phi(d)) / p) y_2 = -delta(d) y_2.
  EXPECT_EQ(envelope_delta(E.y(1)), E.y(2).scaled(-dE));
  EXPECT_NE(envelope_delta(E.y(1)), E.y(2).scaled(dE));
  json j = envelope_to_json(E);
  EXPECT_EQ(j["depth"], 2);
  EXPECT_EQ(j["relations"].size(), 2u);
}

TEST(Envelope, DeltaTableAndPhi) {
  for (i64 p : {2, 3}) {
    Prism P = bk_prism(p, 6, 8);
    const int K = 4;
    Envelope E = envelope_build(P, P.A->u(), K);
    for (int k = 1; k < K; ++k) {
      EnvElem y = E.y(k);
      Elem dpk = P.d.pow(std::uint64_t(zpn::ipow(p, k)));
      EXPECT_EQ(envelope_phi(y), E.y(k + 1).scaled(dpk));
      EXPECT_EQ(E.R->delta_coeff(k).scaled(p), dpk - E.R->phi_k_d(k));
      EXPECT_EQ(envelope_delta(y), E.y(k + 1).scaled(E.R->delta_coeff(k)));
      EXPECT_EQ(envelope_phi(y), y.pow(unsigned(p)) + envelope_delta(y).scaled(p));
    }
    expect_error(ErrorKind::FrontierExceeded, [&] { envelope_delta(E.y(K)); });
    Envelope E2 = envelope_build(P, P.A->u(), 2);
    expect_error(ErrorKind::FrontierExceeded, [&] { envelope_phi(E2.y(2)); });
    EXPECT_TRUE(E.y(K).pow(unsigned(p)).has_frontier());
  }
}

TEST(Envelope, BaseElementsAndRankOne) {
  Prism P = bk_prism(2, 6, 8);
  Envelope E = envelope_build(P, P.A->u(), 3);
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    Elem a = testutil::random_elem(P.A, rng);
    EXPECT_EQ(envelope_delta(E.lift(a)), E.lift(delta_of(a)));
    EXPECT_EQ(envelope_phi(E.lift(a)), E.lift(a.phi()));
  }
  Elem x = P.A->u();
  EXPECT_EQ(envelope_phi(E.lift(x)), E.lift(x.pow(2)));
  EnvElem dy = E.y(1).scaled(P.d);
  EXPECT_EQ(envelope_phi(dy), E.lift(P.d.phi()) * envelope_phi(E.y(1)));
  EXPECT_TRUE(envelope_delta(dy).is_zero());
  expect_error(ErrorKind::NotRankOne, [&] { envelope_build(P, x + P.A->one(), 2); });
  expect_error(ErrorKind::InputError, [&] { envelope_build(P, x, 0); });
}

TEST(Envelope, PhiDeltaConsistencyOnRandomElements) {
  struct Case {
    i64 p;
    int K;
  };
  std::mt19937_64 rng(22);
  for (Case c : {Case{2, 5}, Case{3, 4}}) {
    Prism P = bk_prism(c.p, 6, 8);
    Envelope E = envelope_build(P, P.A->u(), c.K);
    for (int i = 0; i < 100; ++i) {
      EnvElem e = random_env(E, c.K - 2, rng);
      EXPECT_EQ(envelope_phi(e), e.pow(unsigned(c.p)) + envelope_delta(e).scaled(c.p)) << e.str();
    }
  }
}

TEST(Envelope, DeltaLawsOnRandomPairs) {
  std::mt19937_64 rng(23);
  const i64 p = 2;
  Prism P = bk_prism(p, 6, 8);
  Envelope E = envelope_build(P, P.A->u(), 5);
  const int g = 5;
  for (int i = 0; i < 100; ++i) {
    EnvElem a = random_env(E, 2, rng), b = random_env(E, 2, rng);
    EnvElem da = envelope_delta(a), db = envelope_delta(b);
    EnvElem corr = (a.pow(2) + b.pow(2) - (a + b).pow(2));
    EnvElem corr_half(E.R);
    for (const auto& [k, c] : corr.terms())
      corr_half += EnvElem::term(E.R, E.R->exponents(k), div_exact(c, P.A->constant(2), Lift::Balanced));
    EXPECT_TRUE(env_eq_at(envelope_delta(a + b), da + db + corr_half, g));
    EXPECT_TRUE(env_eq_at(envelope_delta(a * b), a.pow(2) * db + b.pow(2) * da + (da * db).scaled(2), g));
  }
}

TEST(Envelope, NilpotenceTrace) {
  for (i64 p : {2, 3}) {
    Prism P = bk_prism(p, 6, 8);
    Envelope E = envelope_build(P, P.A->u(), 5);
    auto cert = nilpotence_certify(E, 3);
    int steps = 0;
    for (const auto& s : cert.trace) {
      EXPECT_TRUE(s.verified) << "k=" << s.k << " m=" << s.m;
      EXPECT_GE(s.d_exponent, zpn::ipow(p, s.k + s.m - 1) - 1);
      ++steps;
    }
    EXPECT_EQ(steps, 10);
    EXPECT_EQ(cert.m, 2);
  }
}

TEST(Envelope, NilpotenceExamples) {
  Prism P = bk_prism(2, 6, 8);
  EXPECT_EQ(nilpotence_certify(P, P.A->u(), 3, 0).m, 0);
  EXPECT_EQ(nilpotence_certify(P, P.A->u(), 3, 3).m, 2);
  EXPECT_EQ(nilpotence_certify(P, P.A->u(), 3, 1).m, 1);
  expect_error(ErrorKind::PrecisionExhausted, [&] { nilpotence_certify(P, P.A->u(), 3, 100); });
  expect_error(ErrorKind::PrecisionExhausted, [&] { nilpotence_certify(P, P.A->u(), 2, 5); });
}

TEST(Envelope, NilpotentBaseHasNoFrontierOverflow) {
  Prism P = bk_prism(2, 4, 4);
  Envelope E = envelope_build(P, P.A->u(), 3);
  EXPECT_TRUE(P.d.pow(7).is_zero());
  EXPECT_TRUE(envelope_phi(E.y(3)).is_zero());
  EXPECT_TRUE(envelope_phi1(E.y(3)).is_zero());
  expect_error(ErrorKind::FrontierExceeded, [&] { envelope_delta(E.y(3)); });
  EnvElem w = E.lift(P.A->one()) + E.y(1) + E.y(3).scaled(P.A->u());
  EXPECT_EQ(w * w.inv(), w.one_like());
}
