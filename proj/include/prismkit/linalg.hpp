#pragma once

// Linear systems over a working ring, solved as Z/p^N-linear systems.

#include <optional>

#include "prismkit/matrix.hpp"
#include "prismkit/ring.hpp"

namespace prismkit {

using EMatrix = Matrix<Elem>;

EMatrix ematrix(const RingPtr& R, int rows, int cols);
EMatrix ematrix(const RingPtr& R, const std::vector<std::vector<i64>>& rows);

struct SolveResult {
  EMatrix X;
  int loss = 0;  // p-adic precision consumed
};

// Some X with A X = B; nullopt when no solution exists.
std::optional<SolveResult> solve(const EMatrix& A, const EMatrix& B);

json to_json(const EMatrix& A);
EMatrix ematrix_from_json(const json& j, const RingPtr& R);

}  // namespace prismkit
