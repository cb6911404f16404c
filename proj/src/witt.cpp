#include "prismkit/witt.hpp"

#include <mutex>
#include <sstream>

namespace prismkit {

namespace {

constexpr int kMaxVars = 16;

IntPoly::Key unit_key(int v) { return IntPoly::Key(1) << (8 * v); }

}  // namespace

IntPoly IntPoly::var(int v) {
  IntPoly r;
  r.t_[unit_key(v)] = 1;
  return r;
}

IntPoly IntPoly::constant(long c) {
  IntPoly r;
  if (c) r.t_[0] = c;
  return r;
}

IntPoly& IntPoly::operator+=(const IntPoly& o) {
  for (const auto& [k, c] : o.t_) {
    auto [it, fresh] = t_.try_emplace(k, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) t_.erase(it);
    }
  }
  return *this;
}

IntPoly& IntPoly::operator-=(const IntPoly& o) {
  for (const auto& [k, c] : o.t_) {
    auto [it, fresh] = t_.try_emplace(k, -c);
    if (!fresh) {
      it->second -= c;
      if (it->second == 0) t_.erase(it);
    }
  }
  return *this;
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  IntPoly r;
  mpz_class tmp;
  for (const auto& [ka, ca] : a.t_)
    for (const auto& [kb, cb] : b.t_) {
      tmp = ca * cb;
      auto [it, fresh] = r.t_.try_emplace(ka + kb, tmp);
      if (!fresh) it->second += tmp;
    }
  for (auto it = r.t_.begin(); it != r.t_.end();) {
    if (it->second == 0)
      it = r.t_.erase(it);
    else
      ++it;
  }
  return r;
}

IntPoly IntPoly::scaled(const mpz_class& k) const {
  IntPoly r;
  if (k == 0) return r;
  for (const auto& [key, c] : t_) r.t_[key] = c * k;
  return r;
}

IntPoly IntPoly::pow(unsigned e) const {
  IntPoly r = constant(1), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

IntPoly IntPoly::divided(const mpz_class& k) const {
  IntPoly r;
  for (const auto& [key, c] : t_) {
    if (!mpz_divisible_p(c.get_mpz_t(), k.get_mpz_t()))
      fail(ErrorKind::NotDivisible, "structure polynomial is not integral");
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), c.get_mpz_t(), k.get_mpz_t());
    r.t_[key] = q;
  }
  return r;
}

std::string IntPoly::str(const std::vector<std::string>& names) const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : t_) {
    mpz_class a = abs(c);
    os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    first = false;
    bool any = false;
    if (a != 1 || key == 0) {
      os << a.get_str();
      any = true;
    }
    for (int v = 0; v < kMaxVars; ++v) {
      int e = exponent(key, v);
      if (!e) continue;
      os << (any ? "*" : "") << names.at(v);
      if (e > 1) os << "^" << e;
      any = true;
    }
  }
  if (first) os << "0";
  return os.str();
}

Elem IntPoly::eval(const std::vector<Elem>& vals) const {
  const RingPtr& R = vals.at(0).ring();
  const i64 m = R->mod();
  int maxe[kMaxVars] = {0};
  for (const auto& [key, c] : t_)
    for (int v = 0; v < kMaxVars; ++v) maxe[v] = std::max(maxe[v], exponent(key, v));
  std::vector<std::vector<Elem>> powers(vals.size());
  for (std::size_t v = 0; v < vals.size(); ++v) {
    powers[v].push_back(R->one());
    for (int e = 1; e <= maxe[v]; ++e) powers[v].push_back(powers[v].back() * vals[v]);
  }
  Elem acc = R->zero();
  for (const auto& [key, c] : t_) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(m));
    Elem term = R->constant(static_cast<i64>(r.get_ui()));
    for (std::size_t v = 0; v < vals.size(); ++v) {
      int e = exponent(key, int(v));
      if (e) term *= powers[v][e];
    }
    acc += term;
  }
  int g = R->N();
  for (const auto& v : vals) g = std::min(g, v.prec());
  return acc.with_prec(g);
}

namespace {

// w_k(z_0, ..., z_k) = sum_i p^i z_i^{p^{k-i}}.
IntPoly ghost_poly(std::int64_t p, int k, int offset) {
  IntPoly w;
  mpz_class pi = 1;
  for (int i = 0; i <= k; ++i) {
    unsigned e = 1;
    for (int j = 0; j < k - i; ++j) e *= unsigned(p);
    w += IntPoly::var(offset + i).pow(e).scaled(pi);
    pi *= p;
  }
  return w;
}

// Solve w_k(R) = target for R_k given R_0..R_{k-1}.
IntPoly ghost_solve(std::int64_t p, int k, const IntPoly& target, const std::vector<IntPoly>& lower) {
  IntPoly rest = target;
  mpz_class pi = 1;
  for (int i = 0; i < k; ++i) {
    unsigned e = 1;
    for (int j = 0; j < k - i; ++j) e *= unsigned(p);
    rest -= lower[i].pow(e).scaled(pi);
    pi *= p;
  }
  return rest.divided(pi);
}

std::shared_ptr<const WittPolys> build(std::int64_t p, int n) {
  auto w = std::make_shared<WittPolys>();
  w->p = p;
  w->n = n;
  for (int k = 0; k < n; ++k) {
    IntPoly wx = ghost_poly(p, k, 0), wy = ghost_poly(p, k, n);
    w->S.push_back(ghost_solve(p, k, wx + wy, w->S));
    w->P.push_back(ghost_solve(p, k, wx * wy, w->P));
  }
  for (int k = 0; k + 1 < n; ++k) w->F.push_back(ghost_solve(p, k, ghost_poly(p, k + 1, 0), w->F));
  return w;
}

}  // namespace

std::shared_ptr<const WittPolys> witt_structure_polys(std::int64_t p, int n) {
  if (!zpn::is_prime(p)) fail(ErrorKind::InvalidSpec, "p must be prime");
  if (n < 1 || n > 5) fail(ErrorKind::TooLarge, "Witt length must lie in 1..5");
  if (zpn::ipow(p, n - 1) > 27) fail(ErrorKind::TooLarge, "structure polynomials beyond desk scale");
  static std::mutex mu;
  static std::map<std::pair<std::int64_t, int>, std::shared_ptr<const WittPolys>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto w = build(p, n);
  cache[key] = w;
  return w;
}

WittVector witt_make(const RingPtr& R, const std::vector<Elem>& comps) {
  for (const auto& c : comps)
    if (!c.ring()->same(*R)) fail(ErrorKind::RingMismatch, "Witt component in another ring");
  return WittVector{R, comps};
}

WittVector witt_from_ints(const RingPtr& R, const std::vector<i64>& comps) {
  WittVector w{R, {}};
  for (i64 c : comps) w.x.push_back(R->constant(c));
  return w;
}

std::vector<Elem> ghost(const WittVector& a) {
  std::vector<Elem> out;
  const i64 p = a.R->p();
  for (int k = 0; k < a.length(); ++k) {
    Elem w = a.R->zero();
    i64 pi = 1;
    for (int i = 0; i <= k; ++i) {
      std::uint64_t e = 1;
      for (int j = 0; j < k - i; ++j) e *= std::uint64_t(p);
      w += a.x[i].pow(e).scaled(pi);
      pi = zpn::mulmod(pi, p, a.R->mod());
    }
    out.push_back(w);
  }
  return out;
}

namespace {

void check_pair(const WittVector& a, const WittVector& b) {
  if (!a.R->same(*b.R)) fail(ErrorKind::RingMismatch, "Witt vectors over different bases");
  if (a.length() != b.length()) fail(ErrorKind::LengthMismatch, "Witt vectors of different lengths");
}

WittVector apply(const std::vector<IntPoly>& polys, const WittVector& a, const WittVector& b) {
  std::vector<Elem> vals = a.x;
  vals.insert(vals.end(), b.x.begin(), b.x.end());
  WittVector out{a.R, {}};
  for (const auto& P : polys) out.x.push_back(P.eval(vals));
  return out;
}

bool is_prime_field(const RingPtr& R) { return R->N() == 1 && R->dim() == 1; }

}  // namespace

WittVector witt_add(const WittVector& a, const WittVector& b) {
  check_pair(a, b);
  return apply(witt_structure_polys(a.R->p(), a.length())->S, a, b);
}

WittVector witt_mul(const WittVector& a, const WittVector& b) {
  check_pair(a, b);
  return apply(witt_structure_polys(a.R->p(), a.length())->P, a, b);
}

WittVector witt_F(const WittVector& a) {
  if (is_prime_field(a.R)) {
    WittVector out = a;
    for (auto& c : out.x) c = c.pow(a.R->p());
    return out;
  }
  if (a.length() < 2) fail(ErrorKind::LengthMismatch, "F needs length at least 2 over this base");
  auto w = witt_structure_polys(a.R->p(), a.length());
  WittVector out{a.R, {}};
  for (const auto& P : w->F) out.x.push_back(P.eval(a.x));
  return out;
}

WittVector witt_V(const WittVector& a) {
  WittVector out{a.R, {a.R->zero()}};
  for (int i = 0; i + 1 < a.length(); ++i) out.x.push_back(a.x[i]);
  return out;
}

WittVector witt_integer(const RingPtr& R, int n, i64 k) {
  if (k < 0) fail(ErrorKind::InputError, "negative integer");
  std::vector<i64> zeros(n, 0);
  WittVector acc = witt_from_ints(R, zeros);
  std::vector<i64> one_v(n, 0);
  one_v[0] = 1;
  WittVector base = witt_from_ints(R, one_v);
  while (k) {
    if (k & 1) acc = witt_add(acc, base);
    k >>= 1;
    if (k) base = witt_add(base, base);
  }
  return acc;
}

bool operator==(const WittVector& a, const WittVector& b) {
  if (a.length() != b.length()) return false;
  for (int i = 0; i < a.length(); ++i)
    if (a.x[i] != b.x[i]) return false;
  return true;
}

json polys_to_json(const WittPolys& w) {
  std::vector<std::string> names;
  for (int i = 0; i < w.n; ++i) names.push_back("x" + std::to_string(i));
  for (int i = 0; i < w.n; ++i) names.push_back("y" + std::to_string(i));
  json j;
  j["p"] = w.p;
  j["len"] = w.n;
  j["S"] = json::array();
  j["P"] = json::array();
  for (const auto& s : w.S) j["S"].push_back(s.str(names));
  for (const auto& s : w.P) j["P"].push_back(s.str(names));
  return j;
}

}  // namespace prismkit
