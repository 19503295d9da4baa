#pragma once

#include <vector>

#include "rdual/model.hpp"
#include "rdual/utility.hpp"

namespace rdual {

/// Convex program over x >= 0:
///
///   minimise  sum_omega zV((L x)_omega, (M x)_omega) + c.x
///   subject to E x = e,
///
/// where zV(y, z) is the perspective of the conjugate. The dual problem,
/// its fixed-mass and restricted variants, and the indifference-price
/// program are all instances: L picks out the (scaled) measure, M the
/// prior mixture.
struct PerspectiveProgram {
  std::size_t variable_count = 0;
  std::vector<Vector> measure_map;  // L, one row per scenario
  std::vector<Vector> base_map;     // M, one row per scenario
  Vector linear;                    // c
  std::vector<Vector> equality;     // E
  Vector rhs;                       // e
};

struct BarrierOptions {
  double initial_mu = 1.0;
  double mu_factor = 0.1;
  /// Stop once (number of inequalities) * mu falls below this.
  double gap_target = 1e-11;
  int max_newton_steps = 2000;
  int max_steps_per_centering = 100;
};

struct BarrierResult {
  Vector x;
  double value = kInf;
  int newton_steps = 0;
  double gap_bound = kInf;  // suboptimality bound of the final iterate
  bool converged = false;
  std::vector<double> history;  // objective after every accepted step
};

double evaluate(const UtilitySpec& utility, const PerspectiveProgram& program, const Vector& x);

/// Log-barrier path following with damped Newton steps in the null space
/// of E. `start` must be strictly positive and satisfy E x = e.
/// Every iterate is feasible, so each recorded value is an upper bound on
/// the optimum.
BarrierResult minimize_perspective_program(const UtilitySpec& utility, const PerspectiveProgram& program,
                                           Vector start, const BarrierOptions& options = {});

}  // namespace rdual
