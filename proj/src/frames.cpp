#include "prismkit/frames.hpp"

#include <climits>

namespace prismkit {

bool CheckReport::ok() const {
  for (const auto& a : items)
    if (a.required && !a.pass) return false;
  return true;
}

const AxiomResult* CheckReport::find(const std::string& name) const {
  for (const auto& a : items)
    if (a.name == name) return &a;
  return nullptr;
}

void CheckReport::add(std::string name, bool pass, std::string witness, bool required) {
  items.push_back(AxiomResult{std::move(name), pass, pass ? std::string() : std::move(witness), required});
}

json to_json(const CheckReport& r) {
  json j;
  j["ok"] = r.ok();
  j["axioms"] = json::array();
  for (const auto& a : r.items) {
    json x{{"name", a.name}, {"pass", a.pass}, {"required", a.required}};
    if (!a.pass) x["witness"] = a.witness;
    j["axioms"].push_back(x);
  }
  return j;
}

namespace {

std::optional<Elem> quotient(const Elem& s, const Elem& g) {
  if (s.is_zero()) return s;
  try {
    return div_exact(s, g, Lift::Balanced);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotDivisible) return std::nullopt;
    throw;
  }
}

Elem poly_elem(const RingPtr& R, const std::vector<i64>& c) {
  Elem x = R->zero();
  for (std::size_t i = 0; i < c.size() && int(i) < R->mu(); ++i)
    if (c[i]) x += R->monomial(int(i), 0, zpn::reduce(c[i], R->mod()));
  return x;
}

// Frame with Fil A = (g) and phi_1(g) = g1.
std::shared_ptr<Frame<Elem>> principal_frame(std::string name, json spec, const Elem& g, const Elem& g1, const Elem& varpi) {
  auto F = std::make_shared<Frame<Elem>>();
  F->name = std::move(name);
  F->spec = std::move(spec);
  F->p = g.ring()->p();
  F->one = g.ring()->one();
  F->fil = {g};
  F->phi1_fil = {g1};
  F->varpi = varpi;
  F->phi1_fn = [g, g1](const Elem& s) -> std::optional<Elem> {
    auto a = quotient(s, g);
    if (!a) return std::nullopt;
    return a->phi() * g1;
  };
  return F;
}

// det(x I - A) by Berkowitz's division-free recursion, leading coefficient first.
std::vector<i64> berkowitz(const std::vector<std::vector<i64>>& A, i64 m) {
  const int n = int(A.size());
  auto neg = [m](i64 x) { return zpn::reduce(-x, m); };
  std::vector<i64> c{1, neg(A[0][0])};
  for (int k = 1; k < n; ++k) {
    std::vector<i64> col(k + 2, 0);
    col[0] = 1;
    col[1] = neg(A[k][k]);
    std::vector<i64> v(k);
    for (int i = 0; i < k; ++i) v[i] = A[i][k];
    for (int s = 0; s < k; ++s) {
      i64 dot = 0;
      for (int i = 0; i < k; ++i) dot = zpn::reduce(dot + zpn::mulmod(A[k][i], v[i], m), m);
      col[2 + s] = neg(dot);
      std::vector<i64> w(k, 0);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) w[i] = zpn::reduce(w[i] + zpn::mulmod(A[i][j], v[j], m), m);
      v = w;
    }
    std::vector<i64> out(k + 2, 0);
    for (int i = 0; i < k + 2; ++i)
      for (int j = 0; j <= std::min(i, k); ++j) out[i] = zpn::reduce(out[i] + zpn::mulmod(col[i - j], c[j], m), m);
    c = out;
  }
  return c;
}

// Quotient of a by the monic b over Z/m (coefficients from degree 0 up).
std::vector<i64> monic_divide(std::vector<i64> a, std::vector<i64> b, i64 m) {
  for (auto& x : a) x = zpn::reduce(x, m);
  for (auto& x : b) x = zpn::reduce(x, m);
  const int db = int(b.size()) - 1;
  const int da = int(a.size()) - 1;
  if (da < db) fail(ErrorKind::NotDivisible, "dividend degree too small");
  std::vector<i64> q(da - db + 1, 0);
  for (int k = da - db; k >= 0; --k) {
    i64 lead = zpn::reduce(a[k + db], m);
    q[k] = lead;
    for (int i = 0; i <= db; ++i) a[k + i] = zpn::reduce(a[k + i] - zpn::mulmod(lead, b[i], m), m);
  }
  for (int i = 0; i < db; ++i)
    if (zpn::reduce(a[i], m)) fail(ErrorKind::NotDivisible, "nonzero remainder in monic division");
  return q;
}

}  // namespace

std::vector<i64> nygaard_generator(i64 p, i64 mod, const std::vector<i64>& monic) {
  const int e = int(monic.size()) - 1;
  if (e < 1) fail(ErrorKind::InvalidSpec, "polynomial must have positive degree");
  std::vector<std::vector<i64>> C(e, std::vector<i64>(e, 0));
  for (int i = 1; i < e; ++i) C[i][i - 1] = 1;
  for (int i = 0; i < e; ++i) C[i][e - 1] = zpn::reduce(-monic[i], mod);
  std::vector<std::vector<i64>> Cp = C;
  for (i64 s = 1; s < p; ++s) {
    std::vector<std::vector<i64>> next(e, std::vector<i64>(e, 0));
    for (int i = 0; i < e; ++i)
      for (int k = 0; k < e; ++k)
        for (int j = 0; j < e; ++j) next[i][j] = zpn::reduce(next[i][j] + zpn::mulmod(Cp[i][k], C[k][j], mod), mod);
    Cp = next;
  }
  std::vector<i64> lead_first = berkowitz(Cp, mod);
  return std::vector<i64>(lead_first.rbegin(), lead_first.rend());
}

FramePtr<Elem> frame_from_prism(const Prism& P, Flavor flavor) {
  const RingPtr& A = P.A;
  const i64 p = A->p();
  json spec{{"kind", "prism"}, {"flavor", flavor == Flavor::D ? "d" : "nygaard"}, {"prism", prism_to_json(P)}};
  if (flavor == Flavor::D) {
    auto F = principal_frame("d-frame", spec, P.d, A->one(), P.d.phi());
    F->d = P.d;
    return F;
  }
  switch (P.kind) {
    case PrismKind::Crystalline:
      return principal_frame("nygaard-frame", spec, P.d, A->one(), P.d);
    case PrismKind::Eisenstein: {
      std::vector<i64> G = nygaard_generator(p, A->mod(), P.eisenstein);
      std::vector<i64> Gp(std::size_t(p) * (G.size() - 1) + 1, 0);
      for (std::size_t k = 0; k < G.size(); ++k) Gp[k * std::size_t(p)] = G[k];
      std::vector<i64> G1 = monic_divide(Gp, P.eisenstein, A->mod());
      return principal_frame("nygaard-frame", spec, poly_elem(A, G), poly_elem(A, G1), P.d);
    }
    case PrismKind::QPrism: {
      if (A->depth() == 0) {
        Elem mu = A->q() - A->one();
        return principal_frame("nygaard-frame", spec, mu, mu, P.d);
      }
      Elem q1 = A->qs().pow(std::uint64_t(zpn::ipow(p, A->depth() - 1)));
      Elem xi = A->zero(), pw = A->one();
      for (i64 i = 0; i < p; ++i) {
        xi += pw;
        pw *= q1;
      }
      return principal_frame("nygaard-frame", spec, xi, A->one(), P.d);
    }
  }
  fail(ErrorKind::InvalidSpec, "unknown prism kind");
}

FramePtr<Elem> witt_frame(i64 p, int n) {
  if (n < 1) fail(ErrorKind::InvalidSpec, "Witt length must be positive");
  RingPtr R = Ring::make(RingSpec{p, n, {}, {}, {}});
  json spec{{"kind", "witt"}, {"p", p}, {"n", n}};
  if (n >= 2) return principal_frame("witt-frame", spec, R->constant(p), R->one(), R->constant(p));
  auto F = std::make_shared<Frame<Elem>>();
  F->name = "witt-frame";
  F->spec = spec;
  F->p = p;
  F->one = R->one();
  F->varpi = R->zero();
  F->phi1_fn = [](const Elem& s) -> std::optional<Elem> {
    if (!s.is_zero()) return std::nullopt;
    return s;
  };
  return F;
}

FramePtr<Elem> frame_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "witt") return witt_frame(j.at("p").get<i64>(), j.at("n").get<int>());
  if (kind == "prism") {
    const std::string fl = j.value("flavor", "d");
    if (fl != "d" && fl != "nygaard") fail(ErrorKind::InputError, "flavor must be d or nygaard");
    return frame_from_prism(prism_from_json(j.at("prism")), fl == "d" ? Flavor::D : Flavor::Nygaard);
  }
  fail(ErrorKind::InputError, "unknown frame kind " + kind);
}

FramePtr<EnvElem> envelope_frame(const Envelope& E, const FramePtr<Elem>& base) {
  if (!(base->varpi == E.R->d()))
    fail(ErrorKind::InvalidSpec, "envelope frame needs a base frame with varpi = d");
  auto F = std::make_shared<Frame<EnvElem>>();
  F->name = "envelope-nygaard-frame";
  F->spec = json{{"kind", "envelope"}, {"K", E.K}, {"base", base->spec}};
  F->p = E.R->p();
  F->one = E.lift(E.R->base()->one());
  for (int k = 1; k <= E.K; ++k) {
    F->fil.push_back(E.y(k));
    F->phi1_fil.push_back(envelope_phi1(E.y(k)));
  }
  for (std::size_t i = 0; i < base->fil.size(); ++i) {
    F->fil.push_back(E.lift(base->fil[i]));
    F->phi1_fil.push_back(E.lift(base->phi1_fil[i]));
  }
  F->varpi = E.lift(base->varpi);
  F->phi1_fn = [E, base](const EnvElem& s) -> std::optional<EnvElem> {
    Elem c0 = s.constant_part();
    auto a = base->phi1_fn(c0);
    if (!a) return std::nullopt;
    return E.lift(*a) + envelope_phi1(s - E.lift(c0));
  };
  return F;
}

FrameMorphism<Elem, EnvElem> envelope_inclusion(const Envelope& E, const FramePtr<Elem>& base,
                                                const FramePtr<EnvElem>& target) {
  return FrameMorphism<Elem, EnvElem>{base, target, [E](const Elem& a) { return E.lift(a); }, target->one};
}

JKernel<EnvElem> envelope_kernel(const Envelope& E) {
  JKernel<EnvElem> J;
  J.name = "(y_1..y_" + std::to_string(E.K) + ")";
  for (int k = 1; k <= E.K; ++k) J.gens.push_back(E.y(k));
  J.contains = [](const EnvElem& s) { return s.constant_part().is_zero() && !s.has_frontier(); };
  EnvRingPtr R = E.R;
  J.level = [R](const EnvElem& s) {
    int best = INT_MAX;
    for (const auto& [key, c] : s.terms()) {
      if (c.is_zero()) continue;
      std::vector<int> e = R->exponents(key);
      int l = 0;
      for (std::size_t k = 0; k < e.size(); ++k)
        if (e[k]) l = int(k) + 1;
      best = std::min(best, l);
    }
    return best;
  };
  J.vanish = E.K + 1;
  return J;
}

JKernel<Elem> elem_kernel(const RingPtr& R, const std::vector<Elem>& gens, const std::string& name) {
  JKernel<Elem> J;
  J.name = name;
  J.gens = gens;
  J.contains = [gens](const Elem& s) { return in_ideal(s, gens); };
  J.level = [gens](const Elem& s) { return s.is_zero() ? INT_MAX : val(s, gens).k; };
  J.vanish = R->default_cap();
  return J;
}

BKModule window_to_bk(const Window<Elem>& W) {
  const auto& F = *W.frame;
  if (!F.d) fail(ErrorKind::InputError, "the Breuil-Kisin functor needs a d-flavor frame");
  NormalData<Elem> nd = normal_decomposition(W);
  const int h = W.rank();
  std::vector<Elem> diag(h, F.one);
  for (int i = 0; i < W.r; ++i) diag[i] = *F.d;
  return BKModule{W.frame, EMatrix::diagonal(diag) * nd.Psi};
}

MinusculeFactor minuscule_factor(const EMatrix& B, const Elem& d) {
  const int h = B.rows();
  if (h == 0 || B.cols() != h) fail(ErrorKind::InputError, "matrix must be square and nonempty");
  const RingPtr& A = d.ring();
  EMatrix X = B;
  EMatrix Lm = EMatrix::identity(h, A->one()), Rm = EMatrix::identity(h, A->one());
  int t = 0;
  // X = Lm B Rm; clear rows and columns through unit pivots.
  for (;; ++t) {
    int pi = -1, pj = -1;
    for (int i = t; i < h && pi < 0; ++i)
      for (int j = t; j < h; ++j)
        if (X(i, j).is_unit()) {
          pi = i;
          pj = j;
          break;
        }
    if (pi < 0) break;
    for (int j = 0; j < h; ++j) {
      std::swap(X(t, j), X(pi, j));
      std::swap(Lm(t, j), Lm(pi, j));
    }
    for (int i = 0; i < h; ++i) {
      std::swap(X(i, t), X(i, pj));
      std::swap(Rm(i, t), Rm(i, pj));
    }
    Elem w = X(t, t).inv();
    for (int i = 0; i < h; ++i) {
      if (i == t || X(i, t).is_zero()) continue;
      Elem f = X(i, t) * w;
      for (int j = 0; j < h; ++j) {
        X(i, j) -= f * X(t, j);
        Lm(i, j) -= f * Lm(t, j);
      }
    }
    for (int j = 0; j < h; ++j) {
      if (j == t || X(t, j).is_zero()) continue;
      Elem f = w * X(t, j);
      for (int i = 0; i < h; ++i) {
        X(i, j) -= X(i, t) * f;
        Rm(i, j) -= Rm(i, t) * f;
      }
    }
  }
  const int r = h - t;
  // X = (diag(units) + Z) * diag(1, .., 1, d, .., d) with Z the quotient block.
  EMatrix core = X;
  for (int i = t; i < h; ++i)
    for (int j = t; j < h; ++j) {
      auto z = quotient(X(i, j), d);
      if (!z) fail(ErrorKind::NotMinuscule, "cokernel is not killed by d: entry " + X(i, j).str());
      core(i, j) = *z;
    }
  if (r > 0 && !is_invertible(core.block(t, t, r, r), A->p()))
    fail(ErrorKind::NotMinuscule, "cokernel is not killed by d");
  // Reorder so that the d-part comes first.
  EMatrix Pi(h, h, A->zero());
  for (int k = 0; k < h; ++k) Pi(k < r ? t + k : k - r, k) = A->one();
  MinusculeFactor out;
  out.r = r;
  out.U = invert_or_fail(Lm, ErrorKind::InputError, "elimination failed") * core * Pi;
  out.V = transpose(Pi) * invert_or_fail(Rm, ErrorKind::InputError, "elimination failed");
  return out;
}

EMatrix MinusculeFactor::D(const Elem& d) const {
  std::vector<Elem> diag(U.rows(), d.one_like());
  for (int i = 0; i < r; ++i) diag[i] = d;
  return EMatrix::diagonal(diag);
}

BKWindow bk_to_window(const FramePtr<Elem>& F, const EMatrix& B) {
  if (!F->d) fail(ErrorKind::InputError, "the Breuil-Kisin functor needs a d-flavor frame");
  MinusculeFactor mf = minuscule_factor(B, *F->d);
  const int h = B.rows();
  EMatrix Psi = mf.V * map_phi(mf.U);
  return BKWindow{window_from_normal(F, EMatrix::identity(h, F->one), mf.r, Psi), mf.U};
}

json to_json(const Window<Elem>& W) {
  json j;
  j["frame"] = W.frame->spec;
  j["rank"] = W.rank();
  j["L"] = W.r;
  j["T"] = W.rank() - W.r;
  j["P"] = to_json(W.P);
  j["phi"] = to_json(W.Phi);
  j["phi1_L"] = W.r ? to_json(W.Phi1L) : json::array();
  if (W.Phi1Fil) {
    j["phi1_fil"] = json::array();
    for (const auto& B : *W.Phi1Fil) j["phi1_fil"].push_back(B.cols() ? to_json(B) : json::array());
  }
  return j;
}

Window<Elem> window_from_json(const json& j) {
  Window<Elem> W;
  W.frame = frame_from_json(j.at("frame"));
  const RingPtr& R = W.frame->one.ring();
  const int h = j.at("rank").get<int>();
  W.r = j.at("L").get<int>();
  if (h < 1 || W.r < 0 || W.r > h) fail(ErrorKind::InputError, "bad window ranks");
  if (j.contains("T") && j["T"].get<int>() != h - W.r) fail(ErrorKind::InputError, "L and T ranks do not add up");
  W.P = j.contains("P") ? ematrix_from_json(j["P"], R) : EMatrix::identity(h, R->one());
  W.Phi = ematrix_from_json(j.at("phi"), R);
  W.Phi1L = W.r ? ematrix_from_json(j.at("phi1_L"), R) : EMatrix(h, 0, R->zero());
  if (j.contains("phi1_fil")) {
    W.Phi1Fil.emplace();
    for (const auto& b : j["phi1_fil"])
      W.Phi1Fil->push_back(h - W.r ? ematrix_from_json(b, R) : EMatrix(h, 0, R->zero()));
  }
  std::string why;
  if (!window_shapes_ok(W, why)) fail(ErrorKind::InputError, why);
  return W;
}

}  // namespace prismkit
