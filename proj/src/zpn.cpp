#include "prismkit/zpn.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace prismkit::zpn {

bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

i64 ipow(i64 b, int e) {
  i64 r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

int valuation(i64 a, i64 p, int N) {
  if (a == 0) return N;
  int v = 0;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return std::min(v, N);
}

i64 inverse(i64 a, i64 m) {
  i64 g = m, x = 0, x1 = 1, a1 = reduce(a, m);
  while (a1) {
    i64 q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw std::domain_error("not a unit");
  return reduce(x, m);
}

i64 powmod(i64 b, std::uint64_t e, i64 m) {
  i64 r = 1 % m;
  b = reduce(b, m);
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

Mat Mat::identity(int n) {
  Mat I(n, n);
  for (int i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

Mat mul(const Mat& x, const Mat& y, i64 m) {
  Mat z(x.r, y.c);
  for (int i = 0; i < x.r; ++i)
    for (int k = 0; k < x.c; ++k) {
      i64 a = x(i, k);
      if (!a) continue;
      for (int j = 0; j < y.c; ++j)
        if (y(k, j)) z(i, j) = addmod(z(i, j), mulmod(a, y(k, j), m), m);
    }
  return z;
}

std::vector<i64> apply(const Mat& x, const std::vector<i64>& v, i64 m) {
  std::vector<i64> out(x.r, 0);
  for (int i = 0; i < x.r; ++i)
    for (int j = 0; j < x.c; ++j)
      if (x(i, j) && v[j]) out[i] = addmod(out[i], mulmod(x(i, j), v[j], m), m);
  return out;
}

namespace {

void row_axpy(Mat& A, int dst, int src, i64 f, i64 m) {
  // row dst -= f * row src
  for (int j = 0; j < A.c; ++j)
    if (A(src, j)) A(dst, j) = submod(A(dst, j), mulmod(f, A(src, j), m), m);
}

void col_axpy(Mat& A, int dst, int src, i64 f, i64 m) {
  // col dst -= f * col src
  for (int i = 0; i < A.r; ++i)
    if (A(i, src)) A(i, dst) = submod(A(i, dst), mulmod(f, A(i, src), m), m);
}

void swap_rows(Mat& A, int i, int k) {
  if (i == k) return;
  for (int j = 0; j < A.c; ++j) std::swap(A(i, j), A(k, j));
}

void swap_cols(Mat& A, int i, int k) {
  if (i == k) return;
  for (int r = 0; r < A.r; ++r) std::swap(A(r, i), A(r, k));
}

void scale_row(Mat& A, int i, i64 w, i64 m) {
  for (int j = 0; j < A.c; ++j) A(i, j) = mulmod(A(i, j), w, m);
}

void scale_col(Mat& A, int j, i64 w, i64 m) {
  for (int i = 0; i < A.r; ++i) A(i, j) = mulmod(A(i, j), w, m);
}

}  // namespace

Smith smith(const Mat& A, i64 p, int N, SmithWant want) {
  const i64 m = ipow(p, N);
  Smith S;
  S.p = p;
  S.N = N;
  Mat D = A;
  if (want.U) S.U = Mat::identity(A.r);
  if (want.Uinv) S.Uinv = Mat::identity(A.r);
  if (want.V) S.V = Mat::identity(A.c);
  if (want.Vinv) S.Vinv = Mat::identity(A.c);
  const int lim = std::min(A.r, A.c);

  for (int k = 0; k < lim; ++k) {
    int best = N, bi = -1, bj = -1;
    for (int i = k; i < D.r && best > 0; ++i)
      for (int j = k; j < D.c; ++j) {
        i64 x = D(i, j);
        if (!x) continue;
        int v = valuation(x, p, N);
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
          if (v == 0) break;
        }
      }
    if (bi < 0) break;
    swap_rows(D, bi, k);
    if (want.U) swap_rows(S.U, bi, k);
    if (want.Uinv) swap_cols(S.Uinv, bi, k);
    swap_cols(D, bj, k);
    if (want.V) swap_cols(S.V, bj, k);
    if (want.Vinv) swap_rows(S.Vinv, bj, k);

    const i64 pv = ipow(p, best);
    const i64 w = D(k, k) / pv;
    const i64 winv = inverse(w, m);
    scale_row(D, k, winv, m);
    if (want.U) scale_row(S.U, k, winv, m);
    if (want.Uinv) scale_col(S.Uinv, k, w, m);

    for (int i = k + 1; i < D.r; ++i) {
      i64 x = D(i, k);
      if (!x) continue;
      i64 f = x / pv;
      row_axpy(D, i, k, f, m);
      if (want.U) row_axpy(S.U, i, k, f, m);
      // inverse: col k += f * col i
      if (want.Uinv) col_axpy(S.Uinv, k, i, f ? m - f : 0, m);
    }
    for (int j = k + 1; j < D.c; ++j) {
      i64 x = D(k, j);
      if (!x) continue;
      i64 f = x / pv;
      col_axpy(D, j, k, f, m);
      if (want.V) col_axpy(S.V, j, k, f, m);
      // inverse: row k += f * row j
      if (want.Vinv) row_axpy(S.Vinv, k, j, f ? m - f : 0, m);
    }
    S.exps.push_back(best);
    S.rank = k + 1;
  }
  return S;
}

std::optional<std::vector<i64>> Smith::solve(const std::vector<i64>& b) const {
  const i64 m = ipow(p, N);
  std::vector<i64> c = apply(U, b, m);
  std::vector<i64> y(V.r, 0);
  for (int i = 0; i < rank; ++i) {
    i64 pe = ipow(p, exps[i]);
    if (c[i] % pe) return std::nullopt;
    y[i] = c[i] / pe;
  }
  for (int i = rank; i < U.r; ++i)
    if (c[i]) return std::nullopt;
  return apply(V, y, m);
}

std::vector<std::vector<i64>> Smith::kernel() const {
  const i64 m = ipow(p, N);
  std::vector<std::vector<i64>> out;
  for (int i = 0; i < V.c; ++i) {
    i64 scale = 1;
    if (i < rank) {
      if (exps[i] == 0) continue;
      scale = ipow(p, N - exps[i]);
    }
    std::vector<i64> e(V.c, 0);
    e[i] = scale;
    out.push_back(apply(V, e, m));
  }
  return out;
}

int Smith::max_exp() const {
  int e = 0;
  for (int i = 0; i < rank; ++i) e = std::max(e, exps[i]);
  return e;
}

Mat span_basis(const Mat& A, i64 p, int N) {
  const i64 m = ipow(p, N);
  Smith S = smith(A, p, N, {.U = false, .V = false, .Uinv = true, .Vinv = false});
  Mat B(A.r, S.rank);
  for (int k = 0; k < S.rank; ++k) {
    i64 pe = ipow(p, S.exps[k]);
    for (int i = 0; i < A.r; ++i) B(i, k) = mulmod(S.Uinv(i, k), pe, m);
  }
  return B;
}

}  // namespace prismkit::zpn
