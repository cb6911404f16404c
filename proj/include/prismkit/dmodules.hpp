#pragma once

// Prismatic Dieudonne modules over catalog prisms given by Frobenius
// matrices: phi_M(v) = Phi * phi(v) on A^h.

#include <optional>

#include "prismkit/frames.hpp"

namespace prismkit {

struct DieudonneModule {
  Prism P;
  EMatrix Phi;
  int rank() const { return Phi.rows(); }
};

// Psi with Phi * Psi = d * Id, read off a minuscule factorization; nullopt
// when the cokernel of Phi is not killed by d.
std::optional<EMatrix> dm_psi(const DieudonneModule& D);

struct DMReport {
  CheckReport report;
  std::optional<EMatrix> psi;
};

DMReport dm_check(const DieudonneModule& D);

// Fil M = L + N^{>=1}A * T for the normal pair given by the columns of P.
struct FilteredDM {
  DieudonneModule D;
  EMatrix P;
  int r = 0;
  EMatrix PL() const { return P.block(0, 0, P.rows(), r); }
  EMatrix PT() const { return P.block(0, r, P.rows(), P.rows() - r); }
};

CheckReport fdm_check(const FilteredDM& F);
// The window over the Nygaard frame with phi_{M,1} = phi_M / d on L.
Window<Elem> fdm_window(const FilteredDM& F);
bool in_fil(const FilteredDM& F, const EMatrix& v);
bool same_filtration(const FilteredDM& a, const FilteredDM& b);

enum class StandardKind { Etale, Multiplicative, QpZpFiltered, MuFiltered };

// Etale: Phi = Id with L = 0. Multiplicative: Phi = d Id with L = M.
// The two filtered kinds are the rank one cases.
FilteredDM standard_module(StandardKind kind, const Prism& P, int h = 1);
StandardKind standard_kind_from_string(const std::string& s);

// Phi^dual = d (Phi^T)^{-1}; NonIntegralDual when D is not valid.
DieudonneModule dual(const DieudonneModule& D);
// Phi_a^T Phi_b = d Id: the evaluation pairing is Frobenius compatible.
bool pairing_compatible(const DieudonneModule& a, const DieudonneModule& b);
// d (X - Y) = 0: X and Y agree up to the ambiguity of one division by d.
bool equal_up_to_division(const EMatrix& X, const EMatrix& Y, const Elem& d);

DieudonneModule forget_filtration(const FilteredDM& F);
// Fil M = phi_M^{-1}(p M) over the crystalline prism.
FilteredDM refill_perfect(const DieudonneModule& D);

// Module coker(Rel) over the crystalline prism Z/p^N with linear phi (F)
// and psi (V); here xi = xi~ = p and phi = id on the base.
struct TorsionDM {
  Prism P;
  EMatrix Rel, F, V;
  int rank() const { return Rel.rows(); }
};

CheckReport torsion_check(const TorsionDM& T);
// Exponents e_i with coker(Rel) = sum Z/p^{e_i}.
std::vector<int> torsion_invariants(const EMatrix& Rel);
bool in_image(const EMatrix& Rel, const EMatrix& X);

TorsionDM isogeny_cokernel(const DieudonneModule& D1, const DieudonneModule& D2, const EMatrix& f);

// 0 -> D1 -i-> D2 -pi-> D3 -> 0 with D1, D2 free and D3 free or presented by Rel3.
struct ShortExact {
  DieudonneModule D1, D2;
  EMatrix Phi3;
  std::optional<EMatrix> Rel3;
  EMatrix i, pi;
};

CheckReport exactness_check(const ShortExact& S);

Elem det(const EMatrix& A);

json to_json(const DieudonneModule& D);
json to_json(const FilteredDM& F);
json to_json(const TorsionDM& T);
DieudonneModule dm_from_json(const json& j);
FilteredDM fdm_from_json(const json& j);
TorsionDM torsion_from_json(const json& j);

}  // namespace prismkit
