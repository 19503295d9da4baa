#include "rdual/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "line_search.hpp"
#include "rdual/functionals.hpp"
#include "rdual/martingale.hpp"
#include "rdual/perspective_program.hpp"

namespace rdual {

double claimless_value(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                       const SolverOptions& options) {
  return solve_dual(model.with_claim(Claim::zero(model.scenario_count())), priors, utility, options).value;
}

double penalty_gamma(const UtilitySpec& utility, const PriorSet& priors, std::span<const double> q, double v0) {
  if (!std::isfinite(v0)) throw std::invalid_argument("penalty_gamma: v0 must be finite");
  auto f = [&](double s) {
    const PositiveMeasure nu = PositiveMeasure::scaled(1.0 / s, q);
    const double d = robust_v_divergence(utility, nu, priors).value;
    return d == kInf ? kInf : s * (d - v0);
  };
  if (f(1.0) == kInf) return kInf;
  return std::max(0.0, detail::minimize_over_positive(f, 1e-3, 1e3, 1e-9).second);
}

double buyer_price(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility, double v0,
                   Vector* q_hat, const SolverOptions& options) {
  check_compatible(model, priors);
  const MartingaleConstraints constraints = build_constraints(model.market);
  const auto q_e = find_equivalent_mm(constraints);
  if (!q_e) throw ValidationError("A3", "assumption A3 violated: no equivalent martingale measure (arbitrage)");

  const std::size_t n = model.scenario_count();
  const std::size_t k = priors.size();
  PerspectiveProgram p;
  p.variable_count = n + k;
  for (std::size_t i = 0; i < n; ++i) {
    Vector l(n + k, 0.0);
    l[i] = 1.0;
    p.measure_map.push_back(std::move(l));
    Vector m(n + k, 0.0);
    for (std::size_t v = 0; v < k; ++v) m[n + v] = priors.vertex(v)[i];
    p.base_map.push_back(std::move(m));
  }
  p.linear.assign(n + k, -v0);
  for (std::size_t i = 0; i < n; ++i) p.linear[i] = model.claim[i];
  for (const Vector& row : constraints.rows) {
    Vector e(n + k, 0.0);
    std::copy(row.begin(), row.end(), e.begin());
    p.equality.push_back(std::move(e));
    p.rhs.push_back(0.0);
  }
  Vector mass(n + k, 0.0);
  std::fill(mass.begin(), mass.begin() + static_cast<std::ptrdiff_t>(n), 1.0);
  p.equality.push_back(std::move(mass));
  p.rhs.push_back(1.0);

  Vector start(n + k, 1.0 / static_cast<double>(k));
  std::copy(q_e->begin(), q_e->end(), start.begin());

  BarrierOptions bo;
  bo.gap_target = options.barrier_gap;
  bo.max_newton_steps = options.max_outer;
  const BarrierResult r = minimize_perspective_program(utility, p, start, bo);
  if (q_hat) q_hat->assign(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(n));
  return r.value;
}

double price_oracle_bisection(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                              double tol, const SolverOptions& options) {
  const std::size_t n = model.scenario_count();
  const double base = solve_primal(model.with_claim(Claim::zero(n)), priors, utility, options).value;
  auto excess = [&](double price) {
    return solve_primal(model.with_claim(model.claim.shifted(-price)), priors, utility, options).value - base;
  };
  double bound = 1.0;
  for (double b : model.claim.payoff()) bound = std::max(bound, std::abs(b) + 1.0);
  double lo = -bound;
  double hi = bound;
  if (excess(lo) < 0.0 || excess(hi) >= 0.0) throw std::runtime_error("price oracle: bracket does not straddle the price");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PriceReport indifference_price(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                               bool with_oracle, const SolverOptions& options) {
  PriceReport r;
  r.v0 = claimless_value(model, priors, utility, options);
  r.p_b = buyer_price(model, priors, utility, r.v0, &r.q_hat, options);
  r.p_s = -buyer_price(model.with_claim(model.claim.scaled(-1.0)), priors, utility, r.v0, nullptr, options);
  r.gamma_at_qhat = penalty_gamma(utility, priors, r.q_hat, r.v0);
  r.formula_residual = std::abs(r.p_b - (expectation(r.q_hat, model.claim.payoff()) + r.gamma_at_qhat));
  if (with_oracle) {
    r.oracle_price = price_oracle_bisection(model, priors, utility, 1e-5, options);
    r.method_agreement = std::abs(r.p_b - r.oracle_price);
  } else {
    r.oracle_price = std::nan("");
    r.method_agreement = std::nan("");
  }
  return r;
}

}  // namespace rdual
