#include "pathcut/simplex.hpp"

#include <cmath>
#include <limits>

#include "pathcut/errors.hpp"

namespace pathcut {
namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-10;
constexpr int kDegenerateBeforeBland = 50;

}  // namespace

LpSolution maximize_packing(const DenseMatrix& a, const std::vector<double>& b,
                            const std::vector<double>& c, int max_pivots) {
  const int m = a.rows;
  const int n = a.cols;
  if (static_cast<int>(b.size()) != m || static_cast<int>(c.size()) != n) {
    throw ValidationError("LP dimension mismatch");
  }
  for (double bi : b) {
    if (bi < 0) throw ValidationError("packing LP needs b >= 0");
  }

  // Columns: n structural, m slack, 1 right-hand side. Last row: objective.
  const int width = n + m + 1;
  DenseMatrix t(m + 1, width);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t.at(i, j) = a.at(i, j);
    t.at(i, n + i) = 1.0;
    t.at(i, width - 1) = b[i];
    basis[i] = n + i;
  }
  for (int j = 0; j < n; ++j) t.at(m, j) = -c[j];

  LpSolution sol;
  int degenerate_run = 0;
  while (true) {
    const bool bland = degenerate_run >= kDegenerateBeforeBland;
    int enter = -1;
    double best = -kCostEps;
    for (int j = 0; j < n + m; ++j) {
      double rc = t.at(m, j);
      if (rc < best) {
        enter = j;
        if (bland) break;
        best = rc;
      }
    }
    if (enter < 0) {
      sol.status = LpStatus::kOptimal;
      break;
    }
    if (sol.pivots >= max_pivots) {
      sol.status = LpStatus::kIterationLimit;
      break;
    }

    int leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double coef = t.at(i, enter);
      if (coef <= kPivotEps) continue;
      double r = t.at(i, width - 1) / coef;
      if (r < ratio - 1e-12 ||
          (r <= ratio + 1e-12 && leave >= 0 && basis[i] < basis[leave])) {
        ratio = r;
        leave = i;
      }
    }
    if (leave < 0) {
      sol.status = LpStatus::kUnbounded;
      break;
    }
    degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;

    const double pivot = t.at(leave, enter);
    double* prow = &t.values[size_t(leave) * width];
    for (int j = 0; j < width; ++j) prow[j] /= pivot;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double factor = t.at(i, enter);
      if (factor == 0.0) continue;
      double* row = &t.values[size_t(i) * width];
      for (int j = 0; j < width; ++j) row[j] -= factor * prow[j];
      row[enter] = 0.0;
    }
    basis[leave] = enter;
    ++sol.pivots;
  }

  sol.objective = t.at(m, width - 1);
  sol.primal.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) sol.primal[basis[i]] = t.at(i, width - 1);
  }
  sol.dual.resize(m);
  for (int i = 0; i < m; ++i) sol.dual[i] = std::max(0.0, t.at(m, n + i));
  return sol;
}

}  // namespace pathcut
