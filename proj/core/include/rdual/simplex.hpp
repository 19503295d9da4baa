#pragma once

#include <string_view>
#include <vector>

#include "rdual/model.hpp"

namespace rdual {

/// min c.x subject to A x = b, x >= 0. A is dense and row-major.
struct LPProblem {
  Vector cost;
  std::vector<Vector> equality;
  Vector rhs;
};

enum class LPStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string_view to_string(LPStatus status);

struct LPSolution {
  LPStatus status = LPStatus::kInfeasible;
  Vector x;
  double objective = 0.0;
  int pivots = 0;
};

struct LPOptions {
  double tolerance = 1e-9;
  int max_pivots = 50000;
};

/// Two-phase dense tableau simplex with Bland's rule. Redundant equality
/// rows are detected and dropped after phase one, so duplicated or
/// all-zero rows are harmless.
LPSolution lp_solve(const LPProblem& problem, const LPOptions& options = {});

}  // namespace rdual
