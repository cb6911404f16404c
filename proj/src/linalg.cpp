#include "prismkit/linalg.hpp"

namespace prismkit {

EMatrix ematrix(const RingPtr& R, int rows, int cols) { return EMatrix(rows, cols, R->zero()); }

EMatrix ematrix(const RingPtr& R, const std::vector<std::vector<i64>>& rows) {
  EMatrix A(int(rows.size()), rows.empty() ? 0 : int(rows[0].size()), R->zero());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) A(i, j) = R->constant(rows[i][j]);
  return A;
}

std::optional<SolveResult> solve(const EMatrix& A, const EMatrix& B) {
  const RingPtr& R = A.zero().ring();
  const int D = R->dim();
  const int r = A.rows(), c = A.cols(), k = B.cols();
  zpn::Mat big(r * D, c * D);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      if (A(i, j).is_zero()) continue;
      zpn::Mat m = multiplication_matrix(A(i, j));
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) big(i * D + a, j * D + b) = m(a, b);
    }
  zpn::Smith S = zpn::smith(big, R->p(), R->N());
  int g = R->N();
  for (const auto& x : A.data()) g = std::min(g, x.prec());
  for (const auto& x : B.data()) g = std::min(g, x.prec());
  const int loss = S.max_exp();
  if (g - loss < 1) fail(ErrorKind::PrecisionExhausted, "linear solve exhausts p-adic precision");
  SolveResult out{EMatrix(c, k, R->zero()), loss};
  for (int col = 0; col < k; ++col) {
    std::vector<i64> rhs(r * D, 0);
    for (int i = 0; i < r; ++i)
      for (int a = 0; a < D; ++a) rhs[i * D + a] = B(i, col).coeffs()[a];
    auto sol = S.solve(rhs);
    if (!sol) return std::nullopt;
    for (int j = 0; j < c; ++j) {
      std::vector<i64> v(sol->begin() + j * D, sol->begin() + (j + 1) * D);
      out.X(j, col) = Elem(R, std::move(v), g - loss);
    }
  }
  return out;
}

json to_json(const EMatrix& A) {
  json rows = json::array();
  for (int i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < A.cols(); ++j) row.push_back(to_json(A(i, j))["coeffs"]);
    rows.push_back(row);
  }
  return rows;
}

EMatrix ematrix_from_json(const json& j, const RingPtr& R) {
  if (!j.is_array()) fail(ErrorKind::InputError, "matrix must be an array of rows");
  const int r = int(j.size());
  const int c = r ? int(j.at(0).size()) : 0;
  EMatrix A(r, c, R->zero());
  for (int i = 0; i < r; ++i) {
    if (int(j.at(i).size()) != c) fail(ErrorKind::InputError, "ragged matrix");
    for (int k = 0; k < c; ++k) A(i, k) = elem_from_json(j.at(i).at(k), R);
  }
  return A;
}

}  // namespace prismkit
