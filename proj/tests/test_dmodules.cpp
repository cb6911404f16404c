#include <gtest/gtest.h>

#include <random>
#include <set>

#include "prismkit/dmodules.hpp"
#include "test_util.hpp"

using namespace prismkit;
using testutil::expect_error;
using testutil::random_elem;
using testutil::random_invertible;

namespace {

std::string failures(const CheckReport& r) { return to_json(r).dump(); }

Prism bk_prism(i64 p, int N, int M) { return eisenstein_prism(p, N, M, {-p, 1}); }

DieudonneModule crys(i64 p, int N, const std::vector<std::vector<i64>>& phi) {
  Prism P = crystalline_prism(p, N);
  return DieudonneModule{P, ematrix(P.A, phi)};
}

// Phi = U diag(d or 1) V with U, V invertible: always a valid module.
DieudonneModule random_module(const Prism& P, int h, std::mt19937_64& rng) {
  std::vector<Elem> diag;
  for (int i = 0; i < h; ++i) diag.push_back(rng() % 2 ? P.d : P.A->one());
  EMatrix Phi = random_invertible(P.A, h, rng) * EMatrix::diagonal(diag) * random_invertible(P.A, h, rng);
  return DieudonneModule{P, Phi};
}

// The subgroup f((Z/p^N)^h) of (Z/p^N)^h, enumerated directly.
std::set<std::vector<i64>> image_set(const EMatrix& f) {
  const RingPtr& R = f.zero().ring();
  const int h = f.cols();
  const i64 m = R->mod();
  std::set<std::vector<i64>> out;
  std::vector<i64> x(h, 0);
  for (;;) {
    std::vector<i64> y(f.rows(), 0);
    for (int i = 0; i < f.rows(); ++i)
      for (int j = 0; j < h; ++j) y[i] = (y[i] + f(i, j).constant_term() * x[j]) % m;
    for (auto& v : y) v = (v + m) % m;
    out.insert(y);
    int k = 0;
    while (k < h && ++x[k] == m) x[k++] = 0;
    if (k == h) break;
  }
  return out;
}

bool columns_in(const std::set<std::vector<i64>>& S, const EMatrix& X) {
  const i64 m = X.zero().ring()->mod();
  for (int j = 0; j < X.cols(); ++j) {
    std::vector<i64> c(X.rows());
    for (int i = 0; i < X.rows(); ++i) c[i] = ((X(i, j).constant_term() % m) + m) % m;
    if (!S.count(c)) return false;
  }
  return true;
}

}  // namespace

TEST(DModules, CheckExamples) {
  auto a = dm_check(crys(3, 6, {{3}}));
  EXPECT_TRUE(a.report.ok());
  ASSERT_TRUE(a.psi);
  EXPECT_EQ(*a.psi, ematrix(a.psi->zero().ring(), {{1}}));

  auto b = dm_check(crys(3, 6, {{1}}));
  EXPECT_TRUE(b.report.ok());
  EXPECT_EQ(*b.psi, ematrix(b.psi->zero().ring(), {{3}}));

  auto c = dm_check(crys(3, 6, {{9}}));
  EXPECT_FALSE(c.report.ok());
  EXPECT_FALSE(c.psi);
}

TEST(DModules, StandardModules) {
  std::vector<Prism> prisms = {crystalline_prism(2, 6), crystalline_prism(3, 4), bk_prism(2, 4, 4),
                               q_prism(2, 4, 0, 6), q_prism(3, 3, 1, 8)};
  for (const Prism& P : prisms)
    for (auto kind : {StandardKind::Etale, StandardKind::Multiplicative, StandardKind::QpZpFiltered,
                      StandardKind::MuFiltered})
      for (int h : {1, 2}) {
        FilteredDM F = standard_module(kind, P, h);
        EXPECT_TRUE(dm_check(F.D).report.ok());
        CheckReport r = fdm_check(F);
        EXPECT_TRUE(r.ok()) << P.A->describe() << " " << failures(r);
      }

  Prism Z = crystalline_prism(5, 4);
  FilteredDM qz = standard_module(StandardKind::QpZpFiltered, Z);
  EXPECT_EQ(qz.D.Phi, ematrix(Z.A, {{1}}));
  EXPECT_EQ(qz.r, 0);
  EXPECT_TRUE(in_fil(qz, ematrix(Z.A, {{5}})));
  EXPECT_FALSE(in_fil(qz, ematrix(Z.A, {{1}})));

  Prism Q = q_prism(2, 4, 0, 6);
  FilteredDM mu = standard_module(StandardKind::MuFiltered, Q);
  EXPECT_EQ(mu.D.Phi(0, 0), q_integer(Q.A, 2));
  EXPECT_EQ(mu.r, 1);
  EXPECT_TRUE(in_fil(mu, ematrix(Q.A, {{1}})));

  EXPECT_EQ(standard_module(StandardKind::MuFiltered, Z).D.Phi, ematrix(Z.A, {{5}}));
  EXPECT_EQ(standard_kind_from_string("etale"), StandardKind::Etale);
  expect_error(ErrorKind::InputError, [] { standard_kind_from_string("nope"); });
}

TEST(DModules, FilteredCheckRejects) {
  Prism Z = crystalline_prism(3, 5);
  // L = M with Phi = 1: phi_M(L) is not in 3 M.
  FilteredDM bad{DieudonneModule{Z, ematrix(Z.A, {{1}})}, ematrix(Z.A, {{1}}), 1};
  CheckReport r = fdm_check(bad);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.find("phi_fil_in_dM")->pass);
  // L = 0 with Phi = 3: phi_M(3 M) = 9 M does not generate 3 M.
  FilteredDM weak{DieudonneModule{Z, ematrix(Z.A, {{3}})}, ematrix(Z.A, {{1}}), 0};
  r = fdm_check(weak);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.find("window_generation")->pass);
}

TEST(DModules, DualExamples) {
  for (const Prism& P : {crystalline_prism(2, 6), bk_prism(3, 3, 4), q_prism(2, 4, 0, 6)})
    for (int h : {1, 3}) {
      FilteredDM et = standard_module(StandardKind::Etale, P, h);
      FilteredDM mu = standard_module(StandardKind::Multiplicative, P, h);
      EXPECT_EQ(dual(mu.D).Phi, et.D.Phi);
      EXPECT_EQ(dual(et.D).Phi, mu.D.Phi);
    }
  expect_error(ErrorKind::NonIntegralDual, [] { dual(crys(2, 6, {{4}})); });
}

TEST(DModules, DualIsInvolution) {
  std::mt19937_64 rng(20);
  int n = 0;
  for (i64 p : {2, 3})
    for (int k = 0; k < 25; ++k, ++n) {
      const int h = 1 + int(rng() % 3);
      Prism P = (k % 3 == 0) ? crystalline_prism(p, 6) : (k % 3 == 1) ? bk_prism(p, 6, 2) : q_prism(p, 6, 0, 2);
      DieudonneModule D = random_module(P, h, rng);
      ASSERT_TRUE(dm_check(D).report.ok());
      DieudonneModule Dv = dual(D);
      EXPECT_TRUE(dm_check(Dv).report.ok());
      EXPECT_TRUE(pairing_compatible(D, Dv));
      EXPECT_TRUE(pairing_compatible(Dv, dual(Dv)));
      EXPECT_TRUE(equal_up_to_division(dual(Dv).Phi, D.Phi, P.d)) << to_json(D.Phi).dump();
    }
  EXPECT_EQ(n, 50);
}

TEST(DModules, DualIsExactOverCrystalline) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 30; ++k) {
    DieudonneModule D = random_module(crystalline_prism(k % 2 ? 3 : 2, 6), 1 + k % 3, rng);
    EXPECT_TRUE(equal_up_to_division(dual(dual(D)).Phi, D.Phi, D.P.d));
  }
}

TEST(DModules, IsogenyExamples) {
  DieudonneModule et = crys(3, 5, {{1}});
  TorsionDM a = isogeny_cokernel(et, et, ematrix(et.P.A, {{3}}));
  EXPECT_TRUE(torsion_check(a).ok()) << failures(torsion_check(a));
  EXPECT_EQ(torsion_invariants(a.Rel), std::vector<int>{1});
  EXPECT_EQ(a.F, ematrix(et.P.A, {{1}}));
  EXPECT_TRUE(in_image(a.Rel, a.V));  // psi = 0 on Z/3

  DieudonneModule mu = crys(3, 5, {{3}});
  TorsionDM b = isogeny_cokernel(mu, mu, ematrix(mu.P.A, {{3}}));
  EXPECT_TRUE(torsion_check(b).ok());
  EXPECT_TRUE(in_image(b.Rel, b.F));  // phi = 0 on Z/3
  EXPECT_EQ(b.V, ematrix(mu.P.A, {{1}}));

  DieudonneModule D2 = crys(3, 5, {{3, 0}, {0, 1}});
  expect_error(ErrorKind::NotEquivariant,
               [&] { isogeny_cokernel(D2, D2, ematrix(D2.P.A, {{0, 1}, {1, 0}})); });
  expect_error(ErrorKind::NotInjective, [&] { isogeny_cokernel(D2, D2, ematrix(D2.P.A, {{1, 0}, {0, 0}})); });
  expect_error(ErrorKind::InputError, [&] { isogeny_cokernel(D2, D2, ematrix(bk_prism(3, 5, 3).A, {{1}})); });
}

TEST(DModules, IsogenyCokernelAgainstEnumeration) {
  std::mt19937_64 rng(22);
  int checked = 0;
  for (int k = 0; k < 200 && checked < 40; ++k) {
    const i64 p = k % 2 ? 3 : 2;
    const int N = p == 2 ? 5 : 3;
    const int h = 1 + int(rng() % 2);
    Prism P = crystalline_prism(p, N);
    DieudonneModule D2 = random_module(P, h, rng);
    EMatrix g = random_invertible(P.A, h, rng);
    DieudonneModule D1{P, *inverse(g) * D2.Phi * g};
    const i64 a = i64(rng() % 4), b = i64(rng() % 3);
    EMatrix f = (P.A->constant(a) * EMatrix::identity(h, P.A->one()) + P.A->constant(b) * D2.Phi) * g;
    TorsionDM T;
    try {
      T = isogeny_cokernel(D1, D2, f);
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::NotInjective);
      continue;
    }
    ++checked;
    CheckReport r;
    try {
      r = torsion_check(T);
    } catch (const Error& e) {
      // Psi carries one digit less than Phi, so deep relations can outrun it.
      ASSERT_EQ(e.kind(), ErrorKind::PrecisionExhausted);
      continue;
    }
    EXPECT_TRUE(r.ok()) << failures(r);
    auto S = image_set(f);
    int len = 0;
    for (int e : torsion_invariants(T.Rel)) len += e;
    i64 total = 1;
    for (int i = 0; i < h; ++i) total *= P.A->mod();
    i64 order = 1;
    for (int i = 0; i < len; ++i) order *= p;
    EXPECT_EQ(i64(S.size()) * order, total);
    EMatrix pI = P.A->constant(p) * EMatrix::identity(h, P.A->one());
    EXPECT_TRUE(columns_in(S, T.F * T.V - pI));
    EXPECT_TRUE(columns_in(S, T.V * T.F - pI));
    EXPECT_TRUE(columns_in(S, T.F * f));
    EXPECT_TRUE(columns_in(S, T.V * f));
  }
  EXPECT_GE(checked, 20);
}

TEST(DModules, TorsionCheckRejects) {
  Prism Z = crystalline_prism(2, 4);
  // Z/2 with phi = psi = 1: phi psi = 1 != 2 on Z/2.
  TorsionDM t{Z, ematrix(Z.A, {{2}}), ematrix(Z.A, {{1}}), ematrix(Z.A, {{1}})};
  CheckReport r = torsion_check(t);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.find("phi_psi_equals_xi_tilde")->pass);
  TorsionDM z{Z, ematrix(Z.A, {{0}}), ematrix(Z.A, {{1}}), ematrix(Z.A, {{2}})};
  EXPECT_FALSE(torsion_check(z).find("presentation_injective")->pass);
  expect_error(ErrorKind::InputError, [] {
    Prism B = bk_prism(2, 4, 3);
    torsion_check(TorsionDM{B, ematrix(B.A, {{2}}), ematrix(B.A, {{1}}), ematrix(B.A, {{2}})});
  });
}

TEST(DModules, ExactnessExamples) {
  Prism Z = crystalline_prism(3, 5);
  DieudonneModule D1 = crys(3, 5, {{3}});
  DieudonneModule D2 = crys(3, 5, {{3, 0}, {0, 1}});
  ShortExact split{D1, D2, ematrix(Z.A, {{1}}), std::nullopt, ematrix(Z.A, {{1}, {0}}), ematrix(Z.A, {{0, 1}})};
  CheckReport r = exactness_check(split);
  EXPECT_TRUE(r.ok()) << failures(r);

  DieudonneModule et = crys(3, 5, {{1}});
  ShortExact notsurj{et, et, ematrix(Z.A, 0, 0), std::nullopt, ematrix(Z.A, {{3}}), ematrix(Z.A, 0, 1)};
  r = exactness_check(notsurj);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.find("exact_middle")->pass);

  // Swapped projection: not equivariant and pi i != 0.
  ShortExact wrong{D1, D2, ematrix(Z.A, {{1}}), std::nullopt, ematrix(Z.A, {{1}, {0}}), ematrix(Z.A, {{1, 0}})};
  r = exactness_check(wrong);
  EXPECT_FALSE(r.find("composite_zero")->pass);
  EXPECT_FALSE(r.find("pi_equivariant")->pass);
}

TEST(DModules, SplicedIsogenySequencesAreExact) {
  std::mt19937_64 rng(23);
  int checked = 0, nontrivial = 0;
  for (int k = 0; k < 100 && checked < 20; ++k) {
    const i64 p = k % 2 ? 3 : 2;
    Prism P = crystalline_prism(p, 5);
    const int h = 1 + int(rng() % 3);
    DieudonneModule D = random_module(P, h, rng);
    EMatrix f = P.A->constant(i64(rng() % 9)) * EMatrix::identity(h, P.A->one()) + D.Phi;
    TorsionDM T;
    try {
      T = isogeny_cokernel(D, D, f);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    ShortExact S{D, D, T.F, T.Rel, f, EMatrix::identity(h, P.A->one())};
    CheckReport r = exactness_check(S);
    EXPECT_TRUE(r.ok()) << failures(r);
    int len = 0;
    for (int e : torsion_invariants(T.Rel)) len += e;
    if (len == 0) continue;
    ++nontrivial;
    S.pi = P.A->constant(p) * S.pi;
    EXPECT_FALSE(exactness_check(S).ok());
  }
  EXPECT_GE(checked, 10);
  EXPECT_GE(nontrivial, 5);
}

TEST(DModules, Determinant) {
  Prism Z = crystalline_prism(2, 8);
  EXPECT_EQ(det(ematrix(Z.A, {{1, 2, 3}, {4, 5, 6}, {7, 8, 10}})), Z.A->constant(-3));
  Prism B = bk_prism(2, 4, 4);
  EMatrix X = ematrix(B.A, 2, 2);
  X(0, 0) = B.A->u();
  X(1, 1) = B.A->u();
  X(0, 1) = B.A->one();
  EXPECT_EQ(det(X), B.A->u() * B.A->u());
}

TEST(DModules, RefillExamples) {
  FilteredDM a = refill_perfect(crys(3, 5, {{3}}));
  EXPECT_EQ(a.r, 1);
  FilteredDM b = refill_perfect(crys(3, 5, {{1}}));
  EXPECT_EQ(b.r, 0);
  EXPECT_TRUE(in_fil(b, ematrix(b.D.P.A, {{3}})));
  EXPECT_FALSE(in_fil(b, ematrix(b.D.P.A, {{1}})));

  DieudonneModule D = crys(3, 5, {{1, 0}, {0, 3}});
  FilteredDM c = refill_perfect(D);
  FilteredDM expect{D, ematrix(D.P.A, {{0, 1}, {1, 0}}), 1};
  EXPECT_EQ(c.r, 1);
  EXPECT_TRUE(same_filtration(c, expect));
  EXPECT_TRUE(fdm_check(c).ok());
  EXPECT_EQ(forget_filtration(c).Phi, D.Phi);

  expect_error(ErrorKind::InputError, [] { refill_perfect(DieudonneModule{bk_prism(2, 4, 3), ematrix(bk_prism(2, 4, 3).A, {{1}})}); });
}

TEST(DModules, RefillReproducesStandardFiltrations) {
  std::mt19937_64 rng(24);
  for (i64 p : {2, 3, 5})
    for (auto kind : {StandardKind::Etale, StandardKind::Multiplicative, StandardKind::QpZpFiltered,
                      StandardKind::MuFiltered})
      for (int h : {1, 2, 3}) {
        FilteredDM F = standard_module(kind, crystalline_prism(p, 4), h);
        FilteredDM G = refill_perfect(forget_filtration(F));
        EXPECT_EQ(G.r, F.r);
        EXPECT_TRUE(same_filtration(F, G));
        EXPECT_EQ(G.P, F.P);
      }
  for (int k = 0; k < 30; ++k) {
    DieudonneModule D = random_module(crystalline_prism(k % 2 ? 2 : 3, 5), 1 + k % 3, rng);
    FilteredDM F = refill_perfect(D);
    EXPECT_TRUE(fdm_check(F).ok()) << failures(fdm_check(F));
    // The filtration is exactly phi_M^{-1}(p M): L maps into p M and T does not.
    EXPECT_TRUE(is_zero_matrix(D.P.A->constant(D.P.A->mod() / D.P.A->p()) * (D.Phi * F.PL())));
  }
}

TEST(DModules, RefillNeedsPrecision) {
  DieudonneModule D = crys(3, 2, {{1, 0}, {0, 3}});
  D.Phi(1, 1) = D.Phi(1, 1).with_prec(1);
  expect_error(ErrorKind::FilNotComputable, [&] { refill_perfect(D); });
}

TEST(DModules, JsonRoundTrip) {
  std::mt19937_64 rng(25);
  for (const Prism& P : {crystalline_prism(3, 4), bk_prism(2, 4, 4), q_prism(2, 4, 0, 6)}) {
    DieudonneModule D = random_module(P, 2, rng);
    FilteredDM F{D, random_invertible(P.A, 2, rng), 1};
    FilteredDM G = fdm_from_json(json::parse(to_json(F).dump()));
    EXPECT_EQ(G.D.Phi, D.Phi);
    EXPECT_EQ(G.P, F.P);
    EXPECT_EQ(G.r, 1);
    EXPECT_EQ(G.D.P.d, P.d);
  }
  Prism Z = crystalline_prism(2, 4);
  TorsionDM T{Z, ematrix(Z.A, {{2}}), ematrix(Z.A, {{1}}), ematrix(Z.A, {{2}})};
  TorsionDM U = torsion_from_json(to_json(T));
  EXPECT_EQ(U.Rel, T.Rel);
  EXPECT_EQ(U.V, T.V);
  expect_error(ErrorKind::InputError,
               [] { dm_from_json(json{{"prism", prism_to_json(crystalline_prism(2, 4))}, {"rank", 2}, {"phi", {{1}}}}); });
}
