#include "prismkit/dmodules.hpp"

namespace prismkit {

namespace {

zpn::Mat to_zpn(const EMatrix& A) {
  zpn::Mat m(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) m(i, j) = A(i, j).constant_term();
  return m;
}

void require_crystalline(const Prism& P, const char* what) {
  if (P.kind != PrismKind::Crystalline) fail(ErrorKind::InputError, std::string(what) + " needs the crystalline prism");
}

const RingPtr& ring_of(const DieudonneModule& D) { return D.P.A; }

std::optional<Elem> divide_by(const Elem& x, const Elem& d) {
  if (x.is_zero()) return x;
  try {
    return div_exact(x, d, Lift::Balanced);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotDivisible) return std::nullopt;
    throw;
  }
}

EMatrix phi_image(const DieudonneModule& D, const EMatrix& v) { return D.Phi * map_phi(v); }

}  // namespace

std::optional<EMatrix> dm_psi(const DieudonneModule& D) {
  if (D.Phi.rows() != D.Phi.cols() || D.rank() == 0) fail(ErrorKind::InputError, "Frobenius matrix must be square");
  try {
    MinusculeFactor mf = minuscule_factor(D.Phi, D.P.d);
    // Phi^{-1} d = V^{-1} (d D^{-1}) U^{-1}, and d D^{-1} swaps the roles of d and 1.
    const int h = D.rank();
    std::vector<Elem> dd(h, D.P.d);
    for (int i = 0; i < mf.r; ++i) dd[i] = D.P.A->one();
    return *inverse(mf.V) * EMatrix::diagonal(dd) * *inverse(mf.U);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotMinuscule) return std::nullopt;
    throw;
  }
}

DMReport dm_check(const DieudonneModule& D) {
  DMReport out;
  out.psi = dm_psi(D);
  bool ok = out.psi && D.Phi * *out.psi == D.P.d * EMatrix::identity(D.rank(), D.P.A->one());
  out.report.add("cokernel_killed_by_d", ok, "no Psi with Phi Psi = d Id");
  return out;
}

Window<Elem> fdm_window(const FilteredDM& F) {
  const DieudonneModule& D = F.D;
  auto frame = frame_from_prism(D.P, Flavor::Nygaard);
  Window<Elem> W;
  W.frame = frame;
  W.P = F.P;
  W.r = F.r;
  W.Phi = D.Phi;
  EMatrix img = phi_image(D, F.PL());
  W.Phi1L = img;
  for (int i = 0; i < img.rows(); ++i)
    for (int j = 0; j < img.cols(); ++j) {
      auto q = divide_by(img(i, j), D.P.d);
      if (!q) fail(ErrorKind::InputError, "phi_M(L) is not contained in d M");
      W.Phi1L(i, j) = *q;
    }
  return W;
}

CheckReport fdm_check(const FilteredDM& F) {
  CheckReport rep;
  const DieudonneModule& D = F.D;
  const int h = D.rank();
  if (F.P.rows() != h || F.P.cols() != h || F.r < 0 || F.r > h) {
    rep.add("normal_pair", false, "basis has the wrong shape");
    return rep;
  }
  rep.add("normal_pair", is_invertible(F.P, D.P.A->p()), "columns of L and T do not form a basis");
  rep.add("cokernel_killed_by_d", dm_psi(D).has_value(), "no Psi with Phi Psi = d Id");
  auto frame = frame_from_prism(D.P, Flavor::Nygaard);
  EMatrix imgL = phi_image(D, F.PL());
  bool in_dM = true;
  std::string wit;
  for (const auto& x : imgL.data())
    if (!divide_by(x, D.P.d)) {
      in_dM = false;
      wit = "phi_M(L) has entry " + x.str() + " outside d A";
      break;
    }
  EMatrix imgT = phi_image(D, F.PT());
  for (const auto& g : frame->fil)
    for (const auto& x : imgT.data())
      if (in_dM && !divide_by(g.phi() * x, D.P.d)) {
        in_dM = false;
        wit = "phi_M(N^1 T) leaves d M";
      }
  rep.add("phi_fil_in_dM", in_dM, wit);
  if (!in_dM) return rep;
  Window<Elem> W = fdm_window(F);
  CheckReport wr = window_check(W);
  const AxiomResult* gen = wr.find("generation");
  rep.add("window_generation", gen->pass, gen->witness);
  // phi_M(Fil M)/d = phi_{M,1}(Fil M); it spans M when phi_1 is surjective.
  const AxiomResult* g1 = wr.find("phi1_generates");
  rep.add("phi_fil_generates_dM", g1->pass, g1->witness, frame->phi1_surjective());
  return rep;
}

bool in_fil(const FilteredDM& F, const EMatrix& v) {
  auto frame = frame_from_prism(F.D.P, Flavor::Nygaard);
  auto Pinv = inverse(F.P);
  if (!Pinv) fail(ErrorKind::InputError, "filtration basis is not invertible");
  EMatrix c = *Pinv * v;
  for (int i = F.r; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j)
      if (!frame->in_fil(c(i, j))) return false;
  return true;
}

bool same_filtration(const FilteredDM& a, const FilteredDM& b) {
  auto gens = [](const FilteredDM& F) {
    auto frame = frame_from_prism(F.D.P, Flavor::Nygaard);
    EMatrix G = F.PL();
    for (const auto& g : frame->fil) G = hstack(G, g * F.PT());
    return G;
  };
  EMatrix ga = gens(a), gb = gens(b);
  return (ga.cols() == 0 || in_fil(b, ga)) && (gb.cols() == 0 || in_fil(a, gb));
}

FilteredDM standard_module(StandardKind kind, const Prism& P, int h) {
  if (h < 1) fail(ErrorKind::InputError, "rank must be positive");
  if (kind == StandardKind::QpZpFiltered || kind == StandardKind::MuFiltered) h = 1;
  const bool mult = kind == StandardKind::Multiplicative || kind == StandardKind::MuFiltered;
  EMatrix I = EMatrix::identity(h, P.A->one());
  FilteredDM F;
  F.D = DieudonneModule{P, mult ? P.d * I : I};
  F.P = I;
  F.r = mult ? h : 0;
  return F;
}

StandardKind standard_kind_from_string(const std::string& s) {
  if (s == "etale") return StandardKind::Etale;
  if (s == "multiplicative") return StandardKind::Multiplicative;
  if (s == "qpzp_filtered") return StandardKind::QpZpFiltered;
  if (s == "mu_filtered") return StandardKind::MuFiltered;
  fail(ErrorKind::InputError, "unknown standard module " + s);
}

DieudonneModule dual(const DieudonneModule& D) {
  auto psi = dm_psi(D);
  if (!psi) fail(ErrorKind::NonIntegralDual, "d (Phi^T)^{-1} is not integral");
  return DieudonneModule{D.P, transpose(*psi)};
}

bool pairing_compatible(const DieudonneModule& a, const DieudonneModule& b) {
  return transpose(a.Phi) * b.Phi == a.P.d * EMatrix::identity(a.rank(), a.P.A->one());
}

bool equal_up_to_division(const EMatrix& X, const EMatrix& Y, const Elem& d) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols()) return false;
  return is_zero_matrix(d * (X - Y));
}

DieudonneModule forget_filtration(const FilteredDM& F) { return F.D; }

FilteredDM refill_perfect(const DieudonneModule& D) {
  require_crystalline(D.P, "refill");
  try {
    MinusculeFactor mf = minuscule_factor(D.Phi, D.P.d);
    FilteredDM F;
    F.D = D;
    F.P = *inverse(mf.V);
    F.r = mf.r;
    return F;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::PrecisionExhausted)
      fail(ErrorKind::FilNotComputable, std::string("phi^{-1}(pM) needs more precision: ") + e.what());
    if (e.kind() == ErrorKind::NotMinuscule) fail(ErrorKind::InputError, "module is not a Dieudonne module");
    throw;
  }
}

std::vector<int> torsion_invariants(const EMatrix& Rel) {
  const RingPtr& R = Rel.zero().ring();
  zpn::Smith S = zpn::smith(to_zpn(Rel), R->p(), R->N(), zpn::SmithWant{false, false, false, false});
  if (S.rank < Rel.rows()) fail(ErrorKind::NotInjective, "presentation has a free part or a kernel at this precision");
  std::vector<int> e;
  for (int i = 0; i < S.rank; ++i)
    if (S.exps[i] > 0) e.push_back(S.exps[i]);
  return e;
}

bool in_image(const EMatrix& Rel, const EMatrix& X) {
  if (X.cols() == 0 || is_zero_matrix(X)) return true;
  return solve(Rel, X).has_value();
}

CheckReport torsion_check(const TorsionDM& T) {
  CheckReport rep;
  require_crystalline(T.P, "torsion modules");
  const int h = T.rank();
  const RingPtr& R = T.P.A;
  bool inj = T.Rel.cols() == h;
  std::string wit = "presentation is not square";
  if (inj) {
    zpn::Smith S = zpn::smith(to_zpn(T.Rel), R->p(), R->N(), zpn::SmithWant{false, false, false, false});
    inj = S.rank == h;
    for (int i = 0; i < S.rank; ++i) inj = inj && S.exps[i] < R->N();
    wit = "presentation matrix is not injective at working precision";
  }
  rep.add("presentation_injective", inj, wit);
  if (!inj) return rep;
  EMatrix pI = R->constant(R->p()) * EMatrix::identity(h, R->one());
  rep.add("phi_well_defined", in_image(T.Rel, T.F * T.Rel), "phi does not preserve the relations");
  rep.add("psi_well_defined", in_image(T.Rel, T.V * T.Rel), "psi does not preserve the relations");
  rep.add("phi_psi_equals_xi_tilde", in_image(T.Rel, T.F * T.V - pI), "phi psi != p on the module");
  rep.add("psi_phi_equals_xi", in_image(T.Rel, T.V * T.F - pI), "psi phi != p on the module");
  return rep;
}

TorsionDM isogeny_cokernel(const DieudonneModule& D1, const DieudonneModule& D2, const EMatrix& f) {
  require_crystalline(D2.P, "isogeny cokernels");
  const int h = D2.rank();
  if (D1.rank() != h || f.rows() != h || f.cols() != h) fail(ErrorKind::InputError, "isogeny needs equal ranks");
  if (!(f * D1.Phi == D2.Phi * map_phi(f))) fail(ErrorKind::NotEquivariant, "f does not commute with Frobenius");
  const RingPtr& R = D2.P.A;
  zpn::Smith S = zpn::smith(to_zpn(f), R->p(), R->N(), zpn::SmithWant{false, false, false, false});
  bool inj = S.rank == h;
  for (int i = 0; i < S.rank; ++i) inj = inj && S.exps[i] < R->N();
  if (!inj) fail(ErrorKind::NotInjective, "f is not injective at working precision");
  auto psi = dm_psi(D2);
  if (!psi) fail(ErrorKind::InputError, "target is not a Dieudonne module");
  return TorsionDM{D2.P, f, D2.Phi, *psi};
}

Elem det(const EMatrix& A) {
  const int n = A.rows();
  if (n != A.cols()) fail(ErrorKind::InputError, "determinant of a non-square matrix");
  if (n == 0) return A.zero().one_like();
  if (n == 1) return A(0, 0);
  Elem acc = A.zero();
  for (int j = 0; j < n; ++j) {
    if (A(0, j).is_zero()) continue;
    EMatrix m(n - 1, n - 1, A.zero());
    for (int i = 1; i < n; ++i)
      for (int k = 0, c = 0; k < n; ++k)
        if (k != j) m(i - 1, c++) = A(i, k);
    Elem t = A(0, j) * det(m);
    acc = (j % 2) ? acc - t : acc + t;
  }
  return acc;
}

namespace {

// Some maximal minor of the h x k matrix (k <= h) is nonzero.
bool has_nonzero_maximal_minor(const EMatrix& A) {
  const int h = A.rows(), k = A.cols();
  if (k == 0) return true;
  if (k > h) return false;
  std::vector<int> rows(k);
  for (int i = 0; i < k; ++i) rows[i] = i;
  for (;;) {
    EMatrix m(k, k, A.zero());
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) m(i, j) = A(rows[i], j);
    if (!det(m).is_zero()) return true;
    int i = k - 1;
    while (i >= 0 && rows[i] == h - k + i) --i;
    if (i < 0) return false;
    ++rows[i];
    for (int j = i + 1; j < k; ++j) rows[j] = rows[j - 1] + 1;
  }
}

}  // namespace

CheckReport exactness_check(const ShortExact& S) {
  CheckReport rep;
  const int h1 = S.D1.rank(), h2 = S.D2.rank(), h3 = S.Phi3.rows();
  const Prism& P = S.D2.P;
  if (S.i.rows() != h2 || S.i.cols() != h1 || S.pi.rows() != h3 || S.pi.cols() != h2) {
    rep.add("shapes", false, "maps have the wrong shapes");
    return rep;
  }
  auto zero_in_3 = [&](const EMatrix& X) {
    if (X.rows() == 0 || X.cols() == 0) return true;
    return S.Rel3 ? in_image(*S.Rel3, X) : is_zero_matrix(X);
  };
  rep.add("i_equivariant", h1 == 0 || S.i * S.D1.Phi == S.D2.Phi * map_phi(S.i), "i phi_1 != phi_2 i");
  rep.add("pi_equivariant", zero_in_3(S.pi * S.D2.Phi - S.Phi3 * map_phi(S.pi)), "pi phi_2 != phi_3 pi");
  rep.add("composite_zero", zero_in_3(S.pi * S.i), "pi i != 0");
  rep.add("i_injective", has_nonzero_maximal_minor(S.i), "every maximal minor of i vanishes");
  EMatrix span3 = S.Rel3 ? hstack(S.pi, *S.Rel3) : S.pi;
  const int rk3 = h3 ? residue_rank(span3, P.A->p()) : 0;
  rep.add("pi_surjective", rk3 == h3, "pi is not surjective");
  if (!S.Rel3) {
    const int rk1 = h1 ? residue_rank(S.i, P.A->p()) : 0;
    bool ok = rk1 == h1 && h2 == h1 + h3;
    rep.add("exact_middle", ok,
            "image of i is not all of ker(pi): i has residue rank " + std::to_string(rk1) + ", ranks " +
                std::to_string(h1) + " + " + std::to_string(h3) + " vs " + std::to_string(h2));
  } else {
    require_crystalline(P, "torsion exactness");
    bool ok = h1 == h2;
    int len_i = 0, len_3 = 0;
    if (ok) {
      for (int e : torsion_invariants(S.i)) len_i += e;
      for (int e : torsion_invariants(*S.Rel3)) len_3 += e;
      ok = len_i == len_3;
    }
    rep.add("exact_middle", ok,
            "coker(i) has length " + std::to_string(len_i) + " but the third term has length " + std::to_string(len_3));
  }
  return rep;
}

json to_json(const DieudonneModule& D) {
  return json{{"prism", prism_to_json(D.P)}, {"rank", D.rank()}, {"phi", to_json(D.Phi)}};
}

json to_json(const FilteredDM& F) {
  json j = to_json(F.D);
  j["fil"] = json{{"L", F.r}, {"T", F.D.rank() - F.r}, {"basis", to_json(F.P)}};
  return j;
}

json to_json(const TorsionDM& T) {
  return json{{"prism", prism_to_json(T.P)},
              {"rank", T.rank()},
              {"relations", to_json(T.Rel)},
              {"phi", to_json(T.F)},
              {"psi", to_json(T.V)}};
}

DieudonneModule dm_from_json(const json& j) {
  Prism P = prism_from_json(j.at("prism"));
  EMatrix Phi = ematrix_from_json(j.at("phi"), P.A);
  if (Phi.rows() != Phi.cols() || Phi.rows() == 0) fail(ErrorKind::InputError, "phi must be a nonempty square matrix");
  if (j.contains("rank") && j["rank"].get<int>() != Phi.rows()) fail(ErrorKind::InputError, "rank does not match phi");
  return DieudonneModule{P, Phi};
}

FilteredDM fdm_from_json(const json& j) {
  FilteredDM F;
  F.D = dm_from_json(j);
  const int h = F.D.rank();
  const json& fil = j.at("fil");
  F.r = fil.at("L").get<int>();
  if (F.r < 0 || F.r > h) fail(ErrorKind::InputError, "L rank out of range");
  if (fil.contains("T") && fil["T"].get<int>() != h - F.r) fail(ErrorKind::InputError, "L and T ranks do not add up");
  F.P = fil.contains("basis") ? ematrix_from_json(fil["basis"], F.D.P.A) : EMatrix::identity(h, F.D.P.A->one());
  return F;
}

TorsionDM torsion_from_json(const json& j) {
  Prism P = prism_from_json(j.at("prism"));
  TorsionDM T{P, ematrix_from_json(j.at("relations"), P.A), ematrix_from_json(j.at("phi"), P.A),
              ematrix_from_json(j.at("psi"), P.A)};
  return T;
}

}  // namespace prismkit
