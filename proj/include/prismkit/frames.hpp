#pragma once

// Frames (A, Fil A, phi, phi_1, varpi) and windows over them, with matrix
// data over a scalar type S (Elem for working rings, EnvElem for envelopes).
//
// A window of rank h is stored through a normal pair: the columns of P are a
// basis of M whose first r columns span L and whose remaining columns span T,
// so that Fil M = L + Fil A * T. phi_M(v) = Phi * phi(v) in standard
// coordinates and phi_{M,1}(P_L e_j) is column j of Phi1L.

#include <climits>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prismkit/envelope.hpp"
#include "prismkit/linalg.hpp"
#include "prismkit/matrix.hpp"

namespace prismkit {

struct AxiomResult {
  std::string name;
  bool pass = true;
  std::string witness;
  bool required = true;
};

struct CheckReport {
  std::vector<AxiomResult> items;
  bool ok() const;
  const AxiomResult* find(const std::string& name) const;
  void add(std::string name, bool pass, std::string witness = {}, bool required = true);
};

json to_json(const CheckReport& r);

template <class S>
struct Frame {
  std::string name;
  json spec;  // how to rebuild the frame
  i64 p = 2;
  S one;
  std::vector<S> fil;       // generators of Fil A
  std::vector<S> phi1_fil;  // phi_1 of each generator
  S varpi;
  // phi_1 on Fil A; nullopt off Fil A.
  std::function<std::optional<S>(const S&)> phi1_fn;
  std::optional<S> d;  // d-flavor orientation: Fil A = (d), phi_1(d) = 1

  bool in_fil(const S& s) const { return phi1_fn(s).has_value(); }
  S phi1(const S& s) const {
    auto r = phi1_fn(s);
    if (!r) fail(ErrorKind::InputError, "element " + to_string(s) + " is not in the filtration");
    return *r;
  }
  bool phi1_surjective() const {
    for (const auto& f : phi1_fil)
      if (is_unit(f)) return true;
    return false;
  }
};

template <class S>
using FramePtr = std::shared_ptr<const Frame<S>>;

// phi(f) = varpi * phi_1(f) on the generators and on the given samples of Fil A.
template <class S>
CheckReport frame_check(const Frame<S>& F, const std::vector<S>& samples = {}) {
  CheckReport rep;
  bool ok = F.fil.size() == F.phi1_fil.size();
  std::string wit;
  for (std::size_t i = 0; ok && i < F.fil.size(); ++i)
    if (!(phi(F.fil[i]) == F.varpi * F.phi1_fil[i])) {
      ok = false;
      wit = "generator " + to_string(F.fil[i]);
    }
  rep.add("phi_equals_varpi_phi1_on_generators", ok, wit);
  ok = true;
  wit.clear();
  for (const auto& s : samples) {
    auto r = F.phi1_fn(s);
    if (!r) {
      ok = false;
      wit = "sample " + to_string(s) + " rejected";
      break;
    }
    if (!(phi(s) == F.varpi * *r)) {
      ok = false;
      wit = "sample " + to_string(s);
      break;
    }
  }
  rep.add("phi_equals_varpi_phi1_on_samples", ok, wit);
  return rep;
}

template <class S>
struct Window {
  FramePtr<S> frame;
  Matrix<S> P;
  int r = 0;
  Matrix<S> Phi;
  Matrix<S> Phi1L;
  // Explicit phi_{M,1}(f_i * P_T), one h x (h - r) block per generator f_i.
  std::optional<std::vector<Matrix<S>>> Phi1Fil;

  int rank() const { return P.rows(); }
  Matrix<S> PL() const { return P.block(0, 0, rank(), r); }
  Matrix<S> PT() const { return P.block(0, r, rank(), rank() - r); }
};

// phi_{M,1}(f_i * P_T).
template <class S>
Matrix<S> phi1_on_fil_t(const Window<S>& W, std::size_t i) {
  if (W.Phi1Fil) return W.Phi1Fil->at(i);
  return W.frame->phi1_fil.at(i) * (W.Phi * map_phi(W.PT()));
}

template <class S>
Matrix<S> invert_or_fail(const Matrix<S>& X, ErrorKind k, const std::string& what) {
  auto inv_ = inverse(X);
  if (!inv_) fail(k, what);
  return *inv_;
}

// phi_{M,1} on columns of v lying in Fil M.
template <class S>
Matrix<S> window_phi1(const Window<S>& W, const Matrix<S>& v) {
  const int h = W.rank(), r = W.r;
  Matrix<S> c = invert_or_fail(W.P, ErrorKind::InputError, "window basis is not invertible") * v;
  Matrix<S> cL = c.block(0, 0, r, v.cols());
  Matrix<S> cT = c.block(r, 0, h - r, v.cols());
  Matrix<S> phi1T = map_entries(cT, [&](const S& s) { return W.frame->phi1(s); });
  Matrix<S> out = W.Phi * map_phi(W.PT()) * phi1T;
  if (r > 0) out = W.Phi1L * map_phi(cL) + out;
  return out;
}

template <class S>
bool window_shapes_ok(const Window<S>& W, std::string& why) {
  const int h = W.rank();
  if (W.P.cols() != h) why = "basis matrix is not square";
  else if (W.r < 0 || W.r > h) why = "L rank out of range";
  else if (W.Phi.rows() != h || W.Phi.cols() != h) why = "phi matrix has the wrong shape";
  else if (W.Phi1L.rows() != h || W.Phi1L.cols() != W.r) why = "phi_1 matrix has the wrong shape";
  else if (W.Phi1Fil && W.Phi1Fil->size() != W.frame->fil.size()) why = "one phi_1 block per generator expected";
  else return true;
  return false;
}

template <class S>
CheckReport window_check(const Window<S>& W) {
  CheckReport rep;
  const Frame<S>& F = *W.frame;
  std::string why;
  if (!window_shapes_ok(W, why)) {
    rep.add("normal_pair", false, why);
    return rep;
  }
  const int h = W.rank();
  rep.add("normal_pair", is_invertible(W.P, F.p), "columns of L and T do not form a basis");

  Matrix<S> phiPL = map_phi(W.PL()), phiPT = map_phi(W.PT());
  Matrix<S> PhiPL = W.Phi * phiPL, PhiPT = W.Phi * phiPT;

  bool lin = true;
  std::string wit;
  for (std::size_t i = 0; lin && i < F.fil.size(); ++i) {
    const S& f = F.fil[i];
    if (W.r > 0 && !(phi(f) * W.Phi1L == F.phi1_fil[i] * PhiPL)) {
      lin = false;
      wit = "phi(f) phi_M1(L) != phi_1(f) phi_M(L) for f = " + to_string(f);
    }
    if (lin && W.Phi1Fil && !((*W.Phi1Fil)[i] == F.phi1_fil[i] * PhiPT)) {
      lin = false;
      wit = "phi_M1(f T) != phi_1(f) phi_M(T) for f = " + to_string(f);
    }
  }
  rep.add("phi1_linearity", lin, wit);

  bool div = W.r == 0 || PhiPL == F.varpi * W.Phi1L;
  wit = div ? "" : "phi_M != varpi phi_M1 on L";
  for (std::size_t i = 0; div && i < F.fil.size(); ++i)
    if (!(phi(F.fil[i]) * PhiPT == F.varpi * phi1_on_fil_t(W, i))) {
      div = false;
      wit = "phi_M != varpi phi_M1 on f T for f = " + to_string(F.fil[i]);
    }
  rep.add("phi_divides", div, wit);

  Matrix<S> gen1 = W.Phi1L;
  for (std::size_t i = 0; i < F.fil.size(); ++i) gen1 = hstack(gen1, phi1_on_fil_t(W, i));
  Matrix<S> all = hstack(gen1, W.Phi);
  int rk = residue_rank(all, F.p);
  rep.add("generation", rk == h, "residue rank " + std::to_string(rk) + " < " + std::to_string(h));
  int rk1 = gen1.cols() ? residue_rank(gen1, F.p) : 0;
  rep.add("phi1_generates", rk1 == h, "residue rank " + std::to_string(rk1) + " < " + std::to_string(h),
          F.phi1_surjective());
  return rep;
}

// M = A, Fil M = Fil A, phi_M = phi, phi_{M,1} = phi_1.
template <class S>
Window<S> unit_window(const FramePtr<S>& F) {
  Window<S> W;
  W.frame = F;
  W.P = Matrix<S>::identity(1, F->one);
  W.r = 0;
  W.Phi = Matrix<S>::identity(1, F->one);
  W.Phi1L = Matrix<S>(1, 0, zero_like(F->one));
  return W;
}

template <class S>
struct NormalData {
  Matrix<S> P;  // L then T
  int r = 0;
  Matrix<S> Psi;  // psi = phi_{M,1} on L, phi_M on T, in the coordinates of P
};

template <class S>
NormalData<S> normal_decomposition(const Window<S>& W) {
  std::string why;
  if (!window_shapes_ok(W, why)) fail(ErrorKind::InputError, why);
  Matrix<S> Pinv = invert_or_fail(W.P, ErrorKind::InputError, "window basis is not invertible");
  Matrix<S> img = hstack(W.Phi1L, W.Phi * map_phi(W.PT()));
  return NormalData<S>{W.P, W.r, Pinv * img};
}

template <class S>
Window<S> window_from_normal(const FramePtr<S>& F, const Matrix<S>& P, int r, const Matrix<S>& Psi) {
  const int h = P.rows();
  if (Psi.rows() != h || Psi.cols() != h) fail(ErrorKind::InputError, "psi has the wrong shape");
  if (!is_invertible(Psi, F->p)) fail(ErrorKind::NonInvertiblePsi, "psi is not invertible");
  Matrix<S> phiPinv = invert_or_fail(map_phi(P), ErrorKind::InputError, "basis is not invertible");
  Matrix<S> PsiL = Psi.block(0, 0, h, r), PsiT = Psi.block(0, r, h, h - r);
  Window<S> W;
  W.frame = F;
  W.P = P;
  W.r = r;
  W.Phi = P * hstack(r ? F->varpi * PsiL : PsiL, PsiT) * phiPinv;
  W.Phi1L = P * PsiL;
  return W;
}

template <class S>
Window<S> window_from_normal(const FramePtr<S>& F, const NormalData<S>& N) {
  return window_from_normal(F, N.P, N.r, N.Psi);
}

// The same window in the coordinates of its normal basis (P = identity).
template <class S>
Window<S> standardize(const Window<S>& W) {
  Matrix<S> Pinv = invert_or_fail(W.P, ErrorKind::InputError, "window basis is not invertible");
  Window<S> out;
  out.frame = W.frame;
  out.P = Matrix<S>::identity(W.rank(), W.frame->one);
  out.r = W.r;
  out.Phi = Pinv * W.Phi * map_phi(W.P);
  out.Phi1L = Pinv * W.Phi1L;
  if (W.Phi1Fil) {
    out.Phi1Fil.emplace();
    for (const auto& B : *W.Phi1Fil) out.Phi1Fil->push_back(Pinv * B);
  }
  return out;
}

// Axioms of a window morphism alpha: M -> N (h_N x h_M matrix).
template <class S>
CheckReport hom_check(const Window<S>& M, const Window<S>& N, const Matrix<S>& alpha) {
  CheckReport rep;
  if (alpha.rows() != N.rank() || alpha.cols() != M.rank()) {
    rep.add("shape", false, "morphism matrix has the wrong shape");
    return rep;
  }
  Matrix<S> img = alpha * M.PL();
  Matrix<S> c = invert_or_fail(N.P, ErrorKind::InputError, "window basis is not invertible") * img;
  bool fil = true;
  std::string wit;
  for (int i = N.r; i < N.rank() && fil; ++i)
    for (int j = 0; j < c.cols(); ++j)
      if (!N.frame->in_fil(c(i, j))) {
        fil = false;
        wit = "image of L has T-coordinate " + to_string(c(i, j)) + " outside Fil A";
        break;
      }
  rep.add("filtration", fil, wit);
  rep.add("phi_compatible", alpha * M.Phi == N.Phi * map_phi(alpha), "alpha phi_M != phi_N phi(alpha)");
  bool p1 = fil && (M.r == 0 || alpha * M.Phi1L == window_phi1(N, img));
  rep.add("phi1_compatible", p1, "alpha phi_M1 != phi_N1 alpha on L");
  return rep;
}

// Ideal J with a depth function witnessing that phi (and phi_1) push it
// deeper; elements of depth >= vanish are zero.
template <class S>
struct JKernel {
  std::string name;
  std::vector<S> gens;
  std::function<bool(const S&)> contains;
  std::function<int(const S&)> level;  // INT_MAX on zero
  int vanish = 0;
};

template <class S>
int matrix_level(const JKernel<S>& J, const Matrix<S>& X) {
  int l = INT_MAX;
  for (const auto& s : X.data()) l = std::min(l, J.level(s));
  return l;
}

template <class S>
bool matrix_in(const JKernel<S>& J, const Matrix<S>& X) {
  for (const auto& s : X.data())
    if (!J.contains(s)) return false;
  return true;
}

enum class Schedule { Series, Iterate };

template <class S>
struct LiftResult {
  Matrix<S> value;
  int iterations = 0;
  std::vector<int> levels;  // depth of each increment
  // Depth of each generator of J and of its images under phi (and phi_1).
  std::vector<std::vector<int>> witness;
};

namespace detail {

template <class S>
std::vector<std::vector<int>> growth_witness(const JKernel<S>& J, const Frame<S>* F) {
  std::vector<std::vector<int>> w;
  for (const auto& g : J.gens) {
    int l0 = J.level(g), l1 = J.level(phi(g));
    std::vector<int> row{l0, l1};
    if (!(l1 > l0)) fail(ErrorKind::NoConvergenceWitness, "phi does not deepen " + to_string(g) + " in " + J.name);
    if (F) {
      auto f1 = F->phi1_fn(g);
      if (!f1) fail(ErrorKind::NoConvergenceWitness, "kernel generator " + to_string(g) + " is not in Fil A");
      int l2 = J.level(*f1);
      if (!(l2 > l0))
        fail(ErrorKind::NoConvergenceWitness, "phi_1 does not deepen " + to_string(g) + " in " + J.name);
      row.push_back(l2);
    }
    w.push_back(row);
  }
  return w;
}

// Adds increments until one vanishes, requiring their depth to grow
// strictly. Series applies the additive step to the last increment; Iterate
// applies it to the running value.
template <class S, class Step>
LiftResult<S> run_series(const JKernel<S>& J, Matrix<S> start, Matrix<S> inc, Schedule sched, Step&& step) {
  LiftResult<S> res;
  Matrix<S> acc = start;
  int last = -1;
  const int max_it = J.vanish + 2;
  while (!is_zero_matrix(inc)) {
    int l = matrix_level(J, inc);
    res.levels.push_back(l);
    if (l <= last || res.iterations > max_it)
      fail(ErrorKind::NoConvergenceWitness, "increments in " + J.name + " stopped deepening");
    last = l;
    ++res.iterations;
    acc = acc + inc;
    inc = sched == Schedule::Series ? step(inc) : step(acc) - acc;
  }
  res.value = acc;
  return res;
}

}  // namespace detail

// Fixed point m of v -> Phi phi(v) with m = m0 modulo J.
template <class S>
LiftResult<S> lift_phi_invariant(const Matrix<S>& Phi, const JKernel<S>& J, const Matrix<S>& m0,
                                 Schedule sched = Schedule::Series) {
  if (Phi.rows() != Phi.cols() || m0.rows() != Phi.rows()) fail(ErrorKind::InputError, "shape mismatch");
  auto step = [&](const Matrix<S>& v) { return Phi * map_phi(v); };
  Matrix<S> z = step(m0) - m0;
  if (!matrix_in(J, z)) fail(ErrorKind::InputError, "vector is not invariant modulo " + J.name);
  auto witness = detail::growth_witness<S>(J, nullptr);
  LiftResult<S> res = detail::run_series(J, m0, z, sched, step);
  res.witness = witness;
  if (!(step(res.value) == res.value)) fail(ErrorKind::NoConvergenceWitness, "lift is not fixed");
  return res;
}

// U(alpha) = Psi_N sigma(alpha) Psi_M^{-1} on standardized windows.
template <class S>
Matrix<S> u_operator(const Window<S>& M, const Window<S>& N, const Matrix<S>& alpha) {
  const Frame<S>& F = *N.frame;
  const int hM = M.rank(), hN = N.rank(), rM = M.r, rN = N.r;
  Matrix<S> LL = alpha.block(0, 0, rN, rM), LT = alpha.block(0, rM, rN, hM - rM);
  Matrix<S> TL = alpha.block(rN, 0, hN - rN, rM), TT = alpha.block(rN, rM, hN - rN, hM - rM);
  Matrix<S> sigma(hN, hM, zero_like(F.one));
  sigma.set_block(0, 0, map_phi(LL));
  sigma.set_block(0, rM, F.varpi * map_phi(LT));
  sigma.set_block(rN, 0, map_entries(TL, [&](const S& s) { return F.phi1(s); }));
  sigma.set_block(rN, rM, map_phi(TT));
  Matrix<S> PsiM = hstack(M.Phi1L, M.Phi.block(0, rM, hM, hM - rM));
  Matrix<S> PsiN = hstack(N.Phi1L, N.Phi.block(0, rN, hN, hN - rN));
  return PsiN * sigma * invert_or_fail(PsiM, ErrorKind::InputError, "window violates the generation axiom");
}

// Unique morphism M -> N congruent to alpha modulo J.
template <class S>
LiftResult<S> lift_window_hom(const Window<S>& M, const Window<S>& N, const Matrix<S>& alpha, const JKernel<S>& J,
                              Schedule sched = Schedule::Series) {
  if (alpha.rows() != N.rank() || alpha.cols() != M.rank()) fail(ErrorKind::InputError, "shape mismatch");
  Window<S> Ms = standardize(M), Ns = standardize(N);
  Matrix<S> a = invert_or_fail(N.P, ErrorKind::InputError, "window basis is not invertible") * alpha * M.P;
  auto step = [&](const Matrix<S>& x) { return u_operator(Ms, Ns, x); };
  Matrix<S> beta = step(a) - a;
  if (!matrix_in(J, beta)) fail(ErrorKind::InputError, "matrix is not a window morphism modulo " + J.name);
  auto witness = detail::growth_witness<S>(J, N.frame.get());
  LiftResult<S> res = detail::run_series(J, a, beta, sched, step);
  res.witness = witness;
  res.value = N.P * res.value * invert_or_fail(M.P, ErrorKind::InputError, "window basis is not invertible");
  return res;
}

template <class S, class T>
struct FrameMorphism {
  FramePtr<S> source;
  FramePtr<T> target;
  std::function<T(const S&)> kappa;
  T c;  // kappa(phi_1(f)) = c * phi_1(kappa(f))
};

template <class S, class T>
CheckReport frame_morphism_check(const FrameMorphism<S, T>& m) {
  CheckReport rep;
  const auto& F = *m.source;
  const auto& G = *m.target;
  bool fil = true, p1 = true, ph = true;
  std::string wf, wp1, wph;
  for (std::size_t i = 0; i < F.fil.size(); ++i) {
    T k = m.kappa(F.fil[i]);
    auto g1 = G.phi1_fn(k);
    if (!g1) {
      fil = false;
      wf = "kappa(" + to_string(F.fil[i]) + ") not in Fil";
      continue;
    }
    if (!(m.kappa(F.phi1_fil[i]) == m.c * *g1)) {
      p1 = false;
      wp1 = "generator " + to_string(F.fil[i]);
    }
    if (!(m.kappa(phi(F.fil[i])) == phi(k))) {
      ph = false;
      wph = "generator " + to_string(F.fil[i]);
    }
  }
  rep.add("filtration", fil, wf);
  rep.add("phi1_compatible", p1, wp1);
  rep.add("phi_compatible", ph, wph);
  rep.add("c_unit", is_unit(m.c), "c is not a unit");
  return rep;
}

template <class S, class T>
Window<T> base_change(const Window<S>& W, const FrameMorphism<S, T>& m) {
  auto mapm = [&](const Matrix<S>& X) {
    Matrix<T> Y(X.rows(), X.cols(), zero_like(m.target->one));
    for (int i = 0; i < X.rows(); ++i)
      for (int j = 0; j < X.cols(); ++j) Y(i, j) = m.kappa(X(i, j));
    return Y;
  };
  Window<T> out;
  out.frame = m.target;
  out.P = mapm(W.P);
  out.r = W.r;
  out.Phi = mapm(W.Phi);
  out.Phi1L = m.c * mapm(W.Phi1L);
  return out;
}

// ---- Concrete frames over working rings ----

enum class Flavor { D, Nygaard };

FramePtr<Elem> frame_from_prism(const Prism& P, Flavor flavor);
// W_n(F_p) = Z/p^n with F = id, Fil = (p), F_1(p a) = a, varpi = p.
FramePtr<Elem> witt_frame(i64 p, int n);
FramePtr<Elem> frame_from_json(const json& j);

// Monic generator of the Nygaard ideal of an Eisenstein prism: the
// characteristic polynomial of C^p for the companion matrix C of E.
std::vector<i64> nygaard_generator(i64 p, i64 mod, const std::vector<i64>& monic);

// Nygaard-type frame on the envelope: Fil = (y_1, ..., y_K) + Fil A, varpi = d.
FramePtr<EnvElem> envelope_frame(const Envelope& E, const FramePtr<Elem>& base);
FrameMorphism<Elem, EnvElem> envelope_inclusion(const Envelope& E, const FramePtr<Elem>& base,
                                                const FramePtr<EnvElem>& target);

// The kernel (y_1, ..., y_K) of the envelope. The depth of a monomial is the
// largest index of a y dividing it; it never drops under multiplication and
// phi, phi_1 raise it by one.
JKernel<EnvElem> envelope_kernel(const Envelope& E);
// Ideal of a working ring with depth measured by the valuation for gens.
JKernel<Elem> elem_kernel(const RingPtr& R, const std::vector<Elem>& gens, const std::string& name);

// ---- Breuil-Kisin modules over d-flavor frames ----

// B = U * diag(d (r times), 1, .., 1) * V with U, V invertible; raises
// NotMinuscule when coker(B) is not killed by d.
struct MinusculeFactor {
  EMatrix U, V;
  int r = 0;
  EMatrix D(const Elem& d) const;
};

MinusculeFactor minuscule_factor(const EMatrix& B, const Elem& d);

// phi(e_j) = sum_i B(i, j) e_i.
struct BKModule {
  FramePtr<Elem> frame;
  EMatrix B;
};

BKModule window_to_bk(const Window<Elem>& W);

struct BKWindow {
  Window<Elem> window;
  EMatrix U;  // window_to_bk(window).B = U^{-1} B phi(U)
};

// Minuscule means coker(B) is killed by d; otherwise NotMinuscule.
BKWindow bk_to_window(const FramePtr<Elem>& F, const EMatrix& B);

json to_json(const Window<Elem>& W);
Window<Elem> window_from_json(const json& j);

}  // namespace prismkit
