#include "prismkit/ext_complex.hpp"

#include <algorithm>
#include <map>

#include "prismkit/error.hpp"
#include "prismkit/zpn.hpp"

namespace prismkit {

using zpn::reduce;

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<i64> o) : orders(std::move(o)) {
  for (i64 d : orders) {
    if (d < 2) fail(ErrorKind::InputError, "cyclic orders must be at least 2");
    if (n_ > 4096 / d) fail(ErrorKind::TooLarge, "group has more than 4096 elements");
    n_ *= d;
  }
  table_.resize(std::size_t(n_ * n_));
  for (i64 a = 0; a < n_; ++a) {
    auto ta = decode(a);
    for (i64 b = 0; b < n_; ++b) {
      auto tb = decode(b);
      for (std::size_t i = 0; i < tb.size(); ++i) tb[i] = (ta[i] + tb[i]) % orders[i];
      table_[std::size_t(a * n_ + b)] = encode(tb);
    }
  }
}

std::vector<i64> FiniteAbelianGroup::decode(i64 x) const {
  std::vector<i64> t(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    t[i] = x % orders[i];
    x /= orders[i];
  }
  return t;
}

i64 FiniteAbelianGroup::encode(const std::vector<i64>& t) const {
  i64 x = 0;
  for (std::size_t i = orders.size(); i-- > 0;) x = x * orders[i] + reduce(t[i], orders[i]);
  return x;
}

namespace {

i64 tuple_index(const FiniteAbelianGroup& G, const std::vector<i64>& xs) {
  i64 k = 0;
  for (std::size_t i = xs.size(); i-- > 0;) k = k * G.size() + xs[i];
  return k;
}

i64 ipow_size(i64 n, int k) {
  i64 r = 1;
  for (int i = 0; i < k; ++i) r *= n;
  return r;
}

void require_shape(const FiniteAbelianGroup& G, const Cochain& c, int arity) {
  if (c.arity != arity || i64(c.v.size()) != ipow_size(G.size(), arity) || c.m < 1)
    fail(ErrorKind::InputError, "cochain table does not match the group");
}

std::vector<std::pair<i64, int>> factor(i64 m) {
  std::vector<std::pair<i64, int>> out;
  for (i64 q = 2; q * q <= m; ++q)
    if (m % q == 0) {
      int e = 0;
      while (m % q == 0) m /= q, ++e;
      out.emplace_back(q, e);
    }
  if (m > 1) out.emplace_back(m, 1);
  return out;
}

// Coboundary matrices with integer entries; columns index the source cochain.
zpn::Mat d1_matrix(const FiniteAbelianGroup& G, i64 mod) {
  const i64 n = G.size();
  zpn::Mat A(int(n * n), int(n));
  for (i64 x = 0; x < n; ++x)
    for (i64 y = 0; y < n; ++y) {
      const int row = int(x + n * y);
      A(row, int(x)) = reduce(A(row, int(x)) - 1, mod);
      A(row, int(G.add(x, y))) = reduce(A(row, int(G.add(x, y))) + 1, mod);
      A(row, int(y)) = reduce(A(row, int(y)) - 1, mod);
    }
  return A;
}

zpn::Mat d2_matrix(const FiniteAbelianGroup& G, i64 mod) {
  const i64 n = G.size();
  zpn::Mat A(int(n * n + n * n * n), int(n * n));
  auto bump = [&](i64 row, i64 col, i64 s) { A(int(row), int(col)) = reduce(A(int(row), int(col)) + s, mod); };
  for (i64 x = 0; x < n; ++x)
    for (i64 y = 0; y < n; ++y) {
      bump(x + n * y, x + n * y, 1);
      bump(x + n * y, y + n * x, -1);
    }
  for (i64 x = 0; x < n; ++x)
    for (i64 y = 0; y < n; ++y)
      for (i64 z = 0; z < n; ++z) {
        const i64 row = n * n + x + n * y + n * n * z;
        bump(row, y + n * z, -1);
        bump(row, G.add(x, y) + n * z, 1);
        bump(row, x + n * G.add(y, z), -1);
        bump(row, x + n * y, 1);
      }
  return A;
}

zpn::Mat columns(const std::vector<std::vector<i64>>& vs, int rows) {
  zpn::Mat M(rows, int(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j)
    for (int i = 0; i < rows; ++i) M(i, int(j)) = vs[j][i];
  return M;
}

// Cyclic orders of ker(D) / im(B) over Z/p^e, where im(B) lies in ker(D).
std::vector<i64> subquotient(const zpn::Mat& D, const zpn::Mat& B, i64 p, int e) {
  const int n = D.c;
  zpn::Smith SD = zpn::smith(D, p, e, {.U = false, .V = true});
  zpn::Mat K = columns(SD.kernel(), n);
  const int k = K.c;
  if (k == 0) return {};
  // Relations among the kernel generators: c with K c in im(B).
  zpn::Mat KB(n, k + B.c);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) KB(i, j) = K(i, j);
    for (int j = 0; j < B.c; ++j) KB(i, k + j) = B(i, j);
  }
  zpn::Smith SK = zpn::smith(KB, p, e, {.U = false, .V = true});
  auto ker = SK.kernel();
  zpn::Mat Rel(k, int(ker.size()));
  for (std::size_t j = 0; j < ker.size(); ++j)
    for (int i = 0; i < k; ++i) Rel(i, int(j)) = ker[j][i];
  zpn::Smith SR = zpn::smith(Rel, p, e, {.U = false, .V = false});
  std::vector<i64> out;
  for (int i = 0; i < SR.rank; ++i)
    if (SR.exps[i] > 0) out.push_back(zpn::ipow(p, SR.exps[i]));
  for (int i = SR.rank; i < k; ++i) out.push_back(zpn::ipow(p, e));
  return out;
}

}  // namespace

Cochain zero_cochain(const FiniteAbelianGroup& G, int arity, i64 m) {
  if (m < 1) fail(ErrorKind::InputError, "coefficient modulus must be positive");
  return Cochain{arity, m, std::vector<i64>(std::size_t(ipow_size(G.size(), arity)), 0)};
}

i64 cochain_at(const FiniteAbelianGroup& G, const Cochain& c, const std::vector<i64>& xs) {
  return c.v.at(std::size_t(tuple_index(G, xs)));
}

void cochain_set(const FiniteAbelianGroup& G, Cochain& c, const std::vector<i64>& xs, i64 value) {
  c.v.at(std::size_t(tuple_index(G, xs))) = reduce(value, c.m);
}

bool is_zero(const Cochain& c) {
  return std::all_of(c.v.begin(), c.v.end(), [&](i64 x) { return reduce(x, c.m) == 0; });
}

Cochain bd_d1(const FiniteAbelianGroup& G, const Cochain& f) {
  require_shape(G, f, 1);
  const i64 n = G.size();
  Cochain out = zero_cochain(G, 2, f.m);
  for (i64 x = 0; x < n; ++x)
    for (i64 y = 0; y < n; ++y) out.v[std::size_t(x + n * y)] = reduce(-f.v[x] + f.v[G.add(x, y)] - f.v[y], f.m);
  return out;
}

std::pair<Cochain, Cochain> bd_d2(const FiniteAbelianGroup& G, const Cochain& g) {
  require_shape(G, g, 2);
  const i64 n = G.size();
  auto at = [&](i64 x, i64 y) { return g.v[std::size_t(x + n * y)]; };
  Cochain a = zero_cochain(G, 2, g.m), b = zero_cochain(G, 3, g.m);
  for (i64 x = 0; x < n; ++x)
    for (i64 y = 0; y < n; ++y) {
      a.v[std::size_t(x + n * y)] = reduce(at(x, y) - at(y, x), g.m);
      for (i64 z = 0; z < n; ++z)
        b.v[std::size_t(x + n * y + n * n * z)] =
            reduce(-at(y, z) + at(G.add(x, y), z) - at(x, G.add(y, z)) + at(x, y), g.m);
    }
  return {a, b};
}

std::vector<i64> invariant_factors(std::vector<i64> cyclic) {
  // Split each order into prime powers, then multiply the largest powers together.
  std::map<i64, std::vector<i64>> parts;
  for (i64 c : cyclic)
    for (auto [q, e] : factor(c)) parts[q].push_back(zpn::ipow(q, e));
  std::size_t len = 0;
  for (auto& [q, v] : parts) {
    std::sort(v.rbegin(), v.rend());
    len = std::max(len, v.size());
  }
  std::vector<i64> out(len, 1);
  for (auto& [q, v] : parts)
    for (std::size_t i = 0; i < v.size(); ++i) out[i] *= v[i];
  std::reverse(out.begin(), out.end());
  return out;
}

ExtGroups ext_groups(const FiniteAbelianGroup& G, i64 m) {
  if (m < 1) fail(ErrorKind::InputError, "coefficient modulus must be positive");
  const i64 n = G.size();
  if (n > 16 || n * n * m > 1000000) fail(ErrorKind::TooLarge, "cochain tables exceed the enumeration budget");
  std::vector<i64> h0, h1;
  for (auto [q, e] : factor(m)) {
    const i64 mod = zpn::ipow(q, e);
    zpn::Mat D1 = d1_matrix(G, mod), D2 = d2_matrix(G, mod);
    for (i64 c : subquotient(D1, zpn::Mat(int(n), 0), q, e)) h0.push_back(c);
    for (i64 c : subquotient(D2, D1, q, e)) h1.push_back(c);
  }
  return ExtGroups{invariant_factors(h0), invariant_factors(h1)};
}

namespace {

// Sign of the shuffle that lists T before S \ T, both in increasing order.
int shuffle_sign(unsigned T, unsigned S) {
  int inv = 0;
  unsigned U = S & ~T;
  for (unsigned a = T; a; a &= a - 1) {
    unsigned lowa = a & -a;
    inv += __builtin_popcount(U & (lowa - 1));
  }
  return inv % 2 ? -1 : 1;
}

}  // namespace

std::vector<std::vector<i64>> coproduct(const std::vector<i64>& x, int r, i64 p) {
  const unsigned dim = 1u << r;
  if (x.size() != dim) fail(ErrorKind::InputError, "element has the wrong number of coordinates");
  std::vector<std::vector<i64>> out(dim, std::vector<i64>(dim, 0));
  for (unsigned S = 0; S < dim; ++S) {
    if (reduce(x[S], p) == 0) continue;
    for (unsigned T = S;; T = (T - 1) & S) {
      out[T][S & ~T] = reduce(out[T][S & ~T] + shuffle_sign(T, S) * x[S], p);
      if (T == 0) break;
    }
  }
  return out;
}

bool is_primitive(const std::vector<i64>& x, int r, i64 p) {
  auto c = coproduct(x, r, p);
  const unsigned dim = 1u << r;
  for (unsigned S = 0; S < dim; ++S)
    for (unsigned T = 0; T < dim; ++T) {
      i64 want = 0;
      if (S == 0) want += x[T];
      if (T == 0) want += x[S];
      if (reduce(c[S][T] - want, p) != 0) return false;
    }
  return true;
}

PrimitiveResult primitive_elements(int r, i64 p) {
  if (r < 0 || !zpn::is_prime(p)) fail(ErrorKind::InputError, "need r >= 0 and p prime");
  const unsigned dim = 1u << std::min(r, 20);
  i64 count = 1;
  for (unsigned i = 0; i < dim; ++i) {
    count *= p;
    if (r > 20 || count > 1000000) fail(ErrorKind::TooLarge, "exterior algebra has too many elements to enumerate");
  }
  PrimitiveResult out;
  out.r = r;
  out.p = p;
  // Greedy basis of the primitive elements, kept in row-echelon form mod p.
  std::vector<std::vector<i64>> echelon;
  std::vector<unsigned> pivots;
  std::vector<i64> x(dim, 0);
  for (i64 k = 0; k < count; ++k) {
    i64 t = k;
    for (unsigned i = 0; i < dim; ++i) x[i] = t % p, t /= p;
    if (!is_primitive(x, r, p)) continue;
    std::vector<i64> y = x;
    for (std::size_t j = 0; j < echelon.size(); ++j) {
      i64 c = y[pivots[j]];
      for (unsigned i = 0; i < dim; ++i) y[i] = reduce(y[i] - c * echelon[j][i], p);
    }
    auto it = std::find_if(y.begin(), y.end(), [](i64 v) { return v != 0; });
    if (it == y.end()) continue;
    unsigned piv = unsigned(it - y.begin());
    i64 inv = zpn::inverse(y[piv], p);
    for (auto& v : y) v = zpn::mulmod(v, inv, p);
    for (auto& row : echelon) {
      i64 c = row[piv];
      for (unsigned i = 0; i < dim; ++i) row[i] = reduce(row[i] - c * y[i], p);
    }
    echelon.push_back(y);
    pivots.push_back(piv);
    out.basis.push_back(x);
  }
  out.dimension = int(out.basis.size());
  bool deg1 = out.dimension == r;
  for (const auto& row : echelon)
    for (unsigned S = 0; S < dim; ++S)
      if (row[S] != 0 && __builtin_popcount(S) != 1) deg1 = false;
  out.equals_degree_one = deg1;
  return out;
}

json to_json(const ExtGroups& e) { return json{{"H0", e.H0}, {"H1", e.H1}}; }

json to_json(const PrimitiveResult& r) {
  return json{{"r", r.r},
              {"p", r.p},
              {"dimension", r.dimension},
              {"basis", r.basis},
              {"equals_degree_one", r.equals_degree_one}};
}

}  // namespace prismkit
