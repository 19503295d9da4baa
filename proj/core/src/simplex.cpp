#include "rdual/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace rdual {

std::string_view to_string(LPStatus status) {
  switch (status) {
    case LPStatus::kOptimal: return "optimal";
    case LPStatus::kInfeasible: return "infeasible";
    case LPStatus::kUnbounded: return "unbounded";
    case LPStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

class Tableau {
 public:
  Tableau(const LPProblem& p, double tol) : n_(p.cost.size()), m_(p.equality.size()), tol_(tol) {
    if (p.rhs.size() != m_) throw std::invalid_argument("lp_solve: rhs dimension mismatch");
    rows_.assign(m_, Vector(n_ + m_ + 1, 0.0));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      if (p.equality[i].size() != n_) throw std::invalid_argument("lp_solve: row dimension mismatch");
      const double sign = p.rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = sign * p.equality[i][j];
      rows_[i][n_ + i] = 1.0;
      rows_[i].back() = sign * p.rhs[i];
      basis_[i] = n_ + i;
    }
  }

  // Runs Bland-rule pivots on columns [0, allowed) for the given costs.
  LPStatus optimise(const Vector& cost, std::size_t allowed, int& pivots, int max_pivots) {
    while (true) {
      if (pivots >= max_pivots) return LPStatus::kIterationLimit;
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (reduced_cost(cost, j) < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return LPStatus::kOptimal;
      std::size_t leave = m_;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const double a = rows_[i][enter];
        if (a <= tol_) continue;
        const double ratio = rows_[i].back() / a;
        if (leave == m_ || ratio < best_ratio - tol_ ||
            (std::abs(ratio - best_ratio) <= tol_ && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) return LPStatus::kUnbounded;
      pivot(leave, enter);
      ++pivots;
    }
  }

  double reduced_cost(const Vector& cost, std::size_t j) const {
    double z = cost[j];
    for (std::size_t i = 0; i < rows_.size(); ++i) z -= cost[basis_[i]] * rows_[i][j];
    return z;
  }

  void pivot(std::size_t r, std::size_t c) {
    Vector& row = rows_[r];
    const double inv = 1.0 / row[c];
    for (double& v : row) v *= inv;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r) continue;
      const double f = rows_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < row.size(); ++j) rows_[i][j] -= f * row[j];
      rows_[i][c] = 0.0;
    }
    basis_[r] = c;
  }

  // Pivots artificial variables out of the basis; drops rows that are
  // linear combinations of the others.
  void expel_artificials() {
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < n_) {
        ++i;
        continue;
      }
      std::size_t col = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::abs(rows_[i][j]) > tol_) {
          col = j;
          break;
        }
      }
      if (col == n_) {
        rows_.erase(rows_.begin() + static_cast<long>(i));
        basis_.erase(basis_.begin() + static_cast<long>(i));
      } else {
        pivot(i, col);
        ++i;
      }
    }
  }

  Vector solution() const {
    Vector x(n_, 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, rows_[i].back());
    return x;
  }

  double artificial_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (basis_[i] >= n_) s += rows_[i].back();
    return s;
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

 private:
  std::size_t n_;
  std::size_t m_;
  double tol_;
  std::vector<Vector> rows_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LPSolution lp_solve(const LPProblem& problem, const LPOptions& options) {
  Tableau tab(problem, options.tolerance);
  const std::size_t n = tab.n();
  const std::size_t m = tab.m();

  LPSolution out;
  double rhs_scale = 1.0;
  for (double b : problem.rhs) rhs_scale = std::max(rhs_scale, std::abs(b));

  Vector phase1(n + m, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1[n + i] = 1.0;
  const LPStatus s1 = tab.optimise(phase1, n + m, out.pivots, options.max_pivots);
  if (s1 == LPStatus::kIterationLimit) {
    out.status = s1;
    return out;
  }
  if (tab.artificial_sum() > options.tolerance * rhs_scale * static_cast<double>(std::max<std::size_t>(m, 1))) {
    out.status = LPStatus::kInfeasible;
    return out;
  }
  tab.expel_artificials();

  Vector phase2(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = problem.cost[j];
  out.status = tab.optimise(phase2, n, out.pivots, options.max_pivots);
  out.x = tab.solution();
  out.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) out.objective += problem.cost[j] * out.x[j];
  return out;
}

}  // namespace rdual
