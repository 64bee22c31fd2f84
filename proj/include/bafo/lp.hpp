#pragma once

#include <cstddef>
#include <vector>

namespace bafo::lp {

template <class Scalar>
struct FeasibilityResult {
  Scalar residual{};      // minimal total artificial mass; zero iff feasible
  std::vector<Scalar> x;  // a minimizer of the residual
  bool converged = true;
};

/// Phase-one simplex for { x >= 0 : A x = b }. Minimizes the L1 violation
/// sum(|A x - b|) through artificial variables and reports the optimum as
/// the residual. Dense tableau with Bland's rule; `eps` is the pivot
/// tolerance (use zero for exact scalars).
template <class Scalar>
FeasibilityResult<Scalar> solve_feasibility(std::vector<std::vector<Scalar>> A, std::vector<Scalar> b,
                                            const Scalar& eps) {
  const std::size_t m = A.size();
  const std::size_t n = m ? A[0].size() : 0;
  FeasibilityResult<Scalar> result;
  result.x.assign(n, Scalar(0));
  if (m == 0) return result;

  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < Scalar(0)) {
      for (auto& a : A[i]) a = -a;
      b[i] = -b[i];
    }
  }

  // Columns: n structural, m artificial, then the right-hand side.
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<Scalar>> t(m + 1, std::vector<Scalar>(cols, Scalar(0)));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = Scalar(1);
    t[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  // Objective row holds reduced costs of min sum(artificials), expressed in
  // the non-basic columns; its last entry is minus the objective value.
  auto& obj = t[m];
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) obj[j] -= t[i][j];
    obj[cols - 1] -= t[i][cols - 1];
  }

  const std::size_t max_iterations = 50 * (m + n + 10);
  std::size_t iteration = 0;
  for (;; ++iteration) {
    if (iteration > max_iterations) {
      result.converged = false;
      break;
    }
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      if (obj[j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;

    std::size_t leave = m;
    Scalar best_ratio{};
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > eps) {
        Scalar ratio = t[i][cols - 1] / t[i][enter];
        if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave == m) break;  // unbounded direction cannot occur in phase one

    const Scalar pivot = t[leave][enter];
    for (auto& v : t[leave]) v /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const Scalar factor = t[i][enter];
      if (factor == Scalar(0)) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= factor * t[leave][j];
    }
    basis[leave] = enter;
  }

  result.residual = -obj[cols - 1];
  if (result.residual < Scalar(0)) result.residual = Scalar(0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) result.x[basis[i]] = t[i][cols - 1];
  }
  return result;
}

}  // namespace bafo::lp
