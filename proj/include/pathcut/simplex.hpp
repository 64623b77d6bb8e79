#pragma once

#include <vector>

namespace pathcut {

enum class LpStatus { kOptimal, kUnbounded, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  double objective = 0.0;
  std::vector<double> primal;  // one per column
  std::vector<double> dual;    // one per row (shadow prices, >= 0)
  int pivots = 0;
};

// Dense row-major matrix, rows x cols.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), values(size_t(r) * c, 0.0) {}
  double& at(int r, int c) { return values[size_t(r) * cols + c]; }
  double at(int r, int c) const { return values[size_t(r) * cols + c]; }
};

// Solves  max c^T y  s.t.  A y <= b, y >= 0  for b >= 0 with a dense tableau
// simplex. The all-slack basis is feasible, so no phase one is needed.
// Pricing is Dantzig's rule, falling back to Bland's rule after a run of
// degenerate pivots.
LpSolution maximize_packing(const DenseMatrix& a, const std::vector<double>& b,
                            const std::vector<double>& c,
                            int max_pivots = 1'000'000);

}  // namespace pathcut
