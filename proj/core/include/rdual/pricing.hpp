#pragma once

#include "rdual/model.hpp"
#include "rdual/solvers.hpp"
#include "rdual/utility.hpp"

namespace rdual {

/// Dual value of the claimless problem, inf over lambda and Q of V(lambda Q | P).
double claimless_value(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                       const SolverOptions& options = {});

/// gamma(Q) = inf_{lambda > 0} (V(lambda Q | P) - v0) / lambda. +inf outside
/// the dual domain.
double penalty_gamma(const UtilitySpec& utility, const PriorSet& priors, std::span<const double> q, double v0);

struct PriceReport {
  double p_b = 0.0;
  double p_s = 0.0;
  double gamma_at_qhat = 0.0;
  double v0 = 0.0;
  double oracle_price = 0.0;
  double method_agreement = 0.0;  // |p_b - oracle_price|
  Vector q_hat;                   // minimiser of E_Q[B] + gamma(Q)
  double formula_residual = 0.0;  // |p_b - (E_Q^[B] + gamma(Q^))|
};

/// Buyer price inf_Q (E_Q[B] + gamma(Q)) computed as one convex program in
/// (Q, s P) with s = 1 / lambda.
double buyer_price(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility, double v0,
                   Vector* q_hat = nullptr, const SolverOptions& options = {});

/// Largest p with primal(B - p) >= primal(0), by bisection on
/// [-(|B|_inf + 1), |B|_inf + 1].
double price_oracle_bisection(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                              double tol = 1e-5, const SolverOptions& options = {});

/// Buyer and seller prices of model.claim, with the bisection cross-check.
/// The oracle is skipped when `with_oracle` is false; its fields are then NaN.
PriceReport indifference_price(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                               bool with_oracle = true, const SolverOptions& options = {});

}  // namespace rdual
