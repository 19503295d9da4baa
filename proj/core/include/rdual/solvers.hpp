#pragma once

#include <vector>

#include "rdual/model.hpp"
#include "rdual/utility.hpp"

namespace rdual {

struct SolverOptions {
  double tol = 1e-6;        // acceptable duality gap
  int max_iter = 10000;     // primal Newton steps
  int max_outer = 2000;     // dual Newton steps
  double barrier_gap = 1e-10;  // target suboptimality of each side
};

struct PrimalResult {
  Strategy theta_hat;
  double value = -kInf;
  int iterations = 0;
  std::vector<std::size_t> active_vertices;
  Vector prior_weights;        // barrier multipliers of the vertex constraints
  std::vector<double> history; // worst-case utility of every iterate
  bool converged = false;
  double gap_bound = kInf;
};

struct DualResult {
  double lambda_hat = 0.0;
  Vector q_hat;
  Vector p_weights;
  Vector p_hat;
  double value = kInf;
  int iterations = 0;
  std::vector<double> history;  // dual objective of every iterate
  bool converged = false;
  double gap_bound = kInf;
  std::vector<std::size_t> q_support;
};

/// sup over strategies of the worst-case expected utility. Log-barrier
/// method on the epigraph form in the span of attainable gains.
PrimalResult solve_primal(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                          const SolverOptions& options = {});

/// inf over nu = lambda Q in the martingale cone and P in the prior hull of
/// V(nu | P) + nu(B), solved jointly in (nu, mixture weights).
DualResult solve_dual(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                      const SolverOptions& options = {});

/// Same as solve_dual with Q restricted to (1 - eps) Q' + eps Q_e, Q_e the
/// equivalent martingale measure from find_equivalent_mm.
DualResult solve_dual_restricted(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                                 double epsilon, const SolverOptions& options = {});

/// inf over Q and P of V(lambda Q | P) + lambda E_Q[B] at fixed lambda > 0.
double dual_value_at_mass(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                          double lambda, const SolverOptions& options = {});

/// inf over lambda > 0 of lambda x + dual_value_at_mass(lambda): the dual
/// side after adding initial capital x.
double initial_capital_value(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                             double x, const SolverOptions& options = {});

struct GapReport {
  double primal = -kInf;
  double dual = kInf;
  double gap = kInf;
  /// min over recorded iterate pairs of dual - primal.
  double worst_pair = kInf;
  bool weak_duality_ok = false;
  bool success = false;
  PrimalResult primal_result;
  DualResult dual_result;
};

GapReport duality_gap(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                      const SolverOptions& options = {});

/// Dual value strictly below V(0); vacuous when V(0) = inf.
bool check_variational_bound(const DualResult& dual, const UtilitySpec& utility);

struct MixingRow {
  double epsilon;
  double value;
  double shift;  // value - unrestricted dual value
};

std::vector<MixingRow> epsilon_mixing_table(const ScenarioModel& model, const PriorSet& priors,
                                            const UtilitySpec& utility, const std::vector<double>& epsilons,
                                            double unrestricted_value, const SolverOptions& options = {});

}  // namespace rdual
