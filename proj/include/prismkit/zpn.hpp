#pragma once

// Dense linear algebra over Z/p^N with int64 residues.

#include <cstdint>
#include <optional>
#include <vector>

namespace prismkit::zpn {

using i64 = std::int64_t;

inline i64 reduce(i64 a, i64 m) {
  a %= m;
  return a < 0 ? a + m : a;
}

inline i64 mulmod(i64 a, i64 b, i64 m) {
  return static_cast<i64>(static_cast<unsigned __int128>(a) *
                          static_cast<unsigned __int128>(b) %
                          static_cast<unsigned __int128>(m));
}

inline i64 addmod(i64 a, i64 b, i64 m) {
  i64 s = a + b;
  return s >= m ? s - m : s;
}

inline i64 submod(i64 a, i64 b, i64 m) {
  i64 s = a - b;
  return s < 0 ? s + m : s;
}

bool is_prime(i64 n);
i64 ipow(i64 b, int e);
// v_p(a) for a in [0, p^N); returns N for a == 0.
int valuation(i64 a, i64 p, int N);
// Inverse of a unit modulo m.
i64 inverse(i64 a, i64 m);
i64 powmod(i64 b, std::uint64_t e, i64 m);

struct Mat {
  int r = 0, c = 0;
  std::vector<i64> a;

  Mat() = default;
  Mat(int rows, int cols) : r(rows), c(cols), a(std::size_t(rows) * cols, 0) {}
  static Mat identity(int n);

  i64& operator()(int i, int j) { return a[std::size_t(i) * c + j]; }
  i64 operator()(int i, int j) const { return a[std::size_t(i) * c + j]; }
};

Mat mul(const Mat& x, const Mat& y, i64 m);
std::vector<i64> apply(const Mat& x, const std::vector<i64>& v, i64 m);

// U * A * V = D with D diagonal, D(i,i) = p^exps[i] for i < rank and
// zero beyond. U and V are invertible. Transforms not requested stay empty.
struct Smith {
  Mat U, V, Uinv, Vinv;
  std::vector<int> exps;
  int rank = 0;
  i64 p = 0;
  int N = 0;

  std::optional<std::vector<i64>> solve(const std::vector<i64>& b) const;
  // Generators of {x : A x = 0}.
  std::vector<std::vector<i64>> kernel() const;
  // Largest exponent among nonzero elementary divisors.
  int max_exp() const;
};

struct SmithWant {
  bool U = true, V = true, Uinv = false, Vinv = false;
};

Smith smith(const Mat& A, i64 p, int N, SmithWant want = {});

// Reduced spanning set of the column span of A (at most A.r columns).
Mat span_basis(const Mat& A, i64 p, int N);

}  // namespace prismkit::zpn
