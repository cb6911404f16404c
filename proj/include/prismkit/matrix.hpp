#pragma once

// Dense matrices over a local scalar ring. The scalar type supplies
// zero_like, one_like, is_zero, is_unit, inv, phi and residue as free
// functions (found by ADL).

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace prismkit {

template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, const S& fill)
      : r_(rows), c_(cols), a_(std::size_t(rows) * cols, fill), zero_(zero_like(fill)) {}

  static Matrix identity(int n, const S& like) {
    Matrix I(n, n, zero_like(like));
    for (int i = 0; i < n; ++i) I(i, i) = one_like(like);
    return I;
  }

  static Matrix diagonal(const std::vector<S>& d) {
    Matrix D(int(d.size()), int(d.size()), zero_like(d.at(0)));
    for (std::size_t i = 0; i < d.size(); ++i) D(int(i), int(i)) = d[i];
    return D;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  S& operator()(int i, int j) { return a_[std::size_t(i) * c_ + j]; }
  const S& operator()(int i, int j) const { return a_[std::size_t(i) * c_ + j]; }

  Matrix block(int i0, int j0, int nr, int nc) const {
    Matrix B(nr, nc, zero_);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) B(i, j) = (*this)(i0 + i, j0 + j);
    return B;
  }

  void set_block(int i0, int j0, const Matrix& B) {
    for (int i = 0; i < B.rows(); ++i)
      for (int j = 0; j < B.cols(); ++j) (*this)(i0 + i, j0 + j) = B(i, j);
  }

  Matrix col(int j) const { return block(0, j, r_, 1); }

  bool operator==(const Matrix& o) const {
    if (r_ != o.r_ || c_ != o.c_) return false;
    for (std::size_t k = 0; k < a_.size(); ++k)
      if (!(a_[k] == o.a_[k])) return false;
    return true;
  }

  const std::vector<S>& data() const { return a_; }
  const S& zero() const { return zero_; }

 private:
  int r_ = 0, c_ = 0;
  std::vector<S> a_;
  S zero_;
};

template <class S>
Matrix<S> operator*(const Matrix<S>& x, const Matrix<S>& y) {
  Matrix<S> z(x.rows(), y.cols(), x.zero());
  for (int i = 0; i < x.rows(); ++i)
    for (int k = 0; k < x.cols(); ++k) {
      if (is_zero(x(i, k))) continue;
      for (int j = 0; j < y.cols(); ++j) z(i, j) += x(i, k) * y(k, j);
    }
  return z;
}

template <class S>
Matrix<S> operator+(Matrix<S> x, const Matrix<S>& y) {
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) x(i, j) += y(i, j);
  return x;
}

template <class S>
Matrix<S> operator-(Matrix<S> x, const Matrix<S>& y) {
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) x(i, j) -= y(i, j);
  return x;
}

template <class S>
Matrix<S> operator*(const S& s, Matrix<S> x) {
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) x(i, j) = s * x(i, j);
  return x;
}

template <class S>
Matrix<S> transpose(const Matrix<S>& x) {
  Matrix<S> t(x.cols(), x.rows(), x.zero());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) t(j, i) = x(i, j);
  return t;
}

template <class S, class F>
Matrix<S> map_entries(const Matrix<S>& x, F&& f) {
  Matrix<S> y = x;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) y(i, j) = f(x(i, j));
  return y;
}

template <class S>
Matrix<S> map_phi(const Matrix<S>& x) {
  return map_entries(x, [](const S& s) { return phi(s); });
}

template <class S>
Matrix<S> hstack(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  Matrix<S> out(a.rows(), a.cols() + b.cols(), a.zero());
  out.set_block(0, 0, a);
  out.set_block(0, a.cols(), b);
  return out;
}

template <class S>
Matrix<S> vstack(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  Matrix<S> out(a.rows() + b.rows(), a.cols(), a.zero());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), 0, b);
  return out;
}

template <class S>
bool is_zero_matrix(const Matrix<S>& x) {
  for (const auto& s : x.data())
    if (!is_zero(s)) return false;
  return true;
}

// Gauss-Jordan with unit pivots; nullopt when the matrix is not invertible.
template <class S>
std::optional<Matrix<S>> inverse(const Matrix<S>& x) {
  const int n = x.rows();
  if (n != x.cols()) return std::nullopt;
  Matrix<S> a = x;
  Matrix<S> b = Matrix<S>::identity(n, x.zero());
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (is_unit(a(i, k))) {
        piv = i;
        break;
      }
    if (piv < 0) return std::nullopt;
    if (piv != k)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(k, j));
        std::swap(b(piv, j), b(k, j));
      }
    S w = inv(a(k, k));
    for (int j = 0; j < n; ++j) {
      a(k, j) = w * a(k, j);
      b(k, j) = w * b(k, j);
    }
    for (int i = 0; i < n; ++i) {
      if (i == k || is_zero(a(i, k))) continue;
      S f = a(i, k);
      for (int j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        b(i, j) -= f * b(k, j);
      }
    }
  }
  return b;
}

// Rank of the reduction modulo the maximal ideal (residue field F_p).
template <class S>
int residue_rank(const Matrix<S>& x, long long p) {
  const int r = x.rows(), c = x.cols();
  std::vector<std::vector<long long>> a(r, std::vector<long long>(c));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) a[i][j] = ((residue(x(i, j)) % p) + p) % p;
  auto modinv = [p](long long v) {
    long long res = 1, b = v % p, e = p - 2;
    while (e) {
      if (e & 1) res = res * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return res;
  };
  int rank = 0;
  for (int j = 0; j < c && rank < r; ++j) {
    int piv = -1;
    for (int i = rank; i < r; ++i)
      if (a[i][j]) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    long long w = modinv(a[rank][j]);
    for (auto& v : a[rank]) v = v * w % p;
    for (int i = 0; i < r; ++i) {
      if (i == rank || !a[i][j]) continue;
      long long f = a[i][j];
      for (int k = 0; k < c; ++k) a[i][k] = ((a[i][k] - f * a[rank][k]) % p + p) % p;
    }
    ++rank;
  }
  return rank;
}

template <class S>
bool is_invertible(const Matrix<S>& x, long long p) {
  return x.rows() == x.cols() && residue_rank(x, p) == x.rows();
}

template <class S>
std::string to_string(const Matrix<S>& x) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < x.rows(); ++i) {
    os << (i ? "; " : "");
    for (int j = 0; j < x.cols(); ++j) os << (j ? ", " : "") << to_string(x(i, j));
  }
  os << "]";
  return os.str();
}

}  // namespace prismkit
