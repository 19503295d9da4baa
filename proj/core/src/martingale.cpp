#include "rdual/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdual {

double MartingaleConstraints::residual(std::span<const double> q) const {
  if (q.size() != scenario_count) throw std::invalid_argument("martingale residual: dimension mismatch");
  double worst = 0.0;
  for (const Vector& row : rows) worst = std::max(worst, std::abs(expectation(row, q)));
  return worst;
}

Vector MartingaleConstraints::gains(std::span<const double> flat_theta) const {
  if (flat_theta.size() != rows.size()) throw std::invalid_argument("gains: strategy dimension mismatch");
  Vector g(scenario_count, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (flat_theta[r] == 0.0) continue;
    for (std::size_t i = 0; i < scenario_count; ++i) g[i] += flat_theta[r] * rows[r][i];
  }
  return g;
}

MartingaleConstraints build_constraints(const Market& market) {
  MartingaleConstraints out;
  out.scenario_count = market.scenario_count();
  const FiltrationTree& tree = market.tree();
  for (std::size_t t = 0; t < market.horizon(); ++t) {
    for (std::size_t c = 0; c < tree.cell_count(t); ++c) {
      const auto now = market.price(t, c);
      for (std::size_t i = 0; i < market.asset_count(); ++i) {
        Vector row(out.scenario_count, 0.0);
        for (std::size_t omega : tree.level(t)[c])
          row[omega] = market.price_at(t + 1, omega, i) - now[i];
        out.rows.push_back(std::move(row));
        out.labels.push_back({t, c, i});
      }
    }
  }
  return out;
}

bool is_member(const MartingaleConstraints& constraints, std::span<const double> q, double tol) {
  for (double v : q)
    if (v < 0.0) throw std::invalid_argument("is_member: q must be nonnegative");
  return constraints.residual(q) <= tol;
}

std::optional<Vector> find_equivalent_mm(const MartingaleConstraints& constraints) {
  // Variables (s, tau) with q = s + tau 1; maximise tau.
  const std::size_t n = constraints.scenario_count;
  LPProblem lp;
  lp.cost.assign(n + 1, 0.0);
  lp.cost[n] = -1.0;
  for (const Vector& row : constraints.rows) {
    Vector r(n + 1, 0.0);
    double row_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = row[i];
      row_sum += row[i];
    }
    r[n] = row_sum;
    lp.equality.push_back(std::move(r));
    lp.rhs.push_back(0.0);
  }
  Vector norm(n + 1, 1.0);
  norm[n] = static_cast<double>(n);
  lp.equality.push_back(std::move(norm));
  lp.rhs.push_back(1.0);

  const LPSolution sol = lp_solve(lp);
  if (sol.status != LPStatus::kOptimal) return std::nullopt;
  const double tau = sol.x[n];
  if (!(tau > 1e-10)) return std::nullopt;
  Vector q(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = sol.x[i] + tau;
    total += q[i];
  }
  for (double& v : q) v /= total;
  return q;
}

bool in_m_v(const UtilitySpec& utility, const PriorSet& priors, const MartingaleConstraints& constraints,
            std::span<const double> q) {
  if (q.size() != priors.scenario_count()) throw std::invalid_argument("in_m_v: dimension mismatch");
  if (!is_member(constraints, q, 1e-8)) throw std::invalid_argument("in_m_v: q is not a martingale measure");
  const std::size_t n = q.size();
  if (utility.v_at_zero() < kInf) {
    // V finite on [0, inf): only q << P matters, and the vertex average has
    // the largest support in the hull.
    const Vector avg = priors.average();
    for (std::size_t i = 0; i < n; ++i)
      if (q[i] > 0.0 && avg[i] == 0.0) return false;
    return true;
  }
  // V(0) = inf additionally forbids P-charged, q-null scenarios: need some P
  // in the hull with supp P = supp q.
  std::vector<bool> covered(n, false);
  for (const Vector& p : priors.vertices()) {
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i)
      if (p[i] > 0.0 && q[i] == 0.0) inside = false;
    if (!inside) continue;
    for (std::size_t i = 0; i < n; ++i)
      if (p[i] > 0.0) covered[i] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (q[i] > 0.0 && !covered[i]) return false;
  return true;
}

std::pair<double, double> martingale_price_bounds(const MartingaleConstraints& constraints,
                                                  std::span<const double> payoff) {
  const std::size_t n = constraints.scenario_count;
  if (payoff.size() != n) throw std::invalid_argument("price bounds: dimension mismatch");
  LPProblem lp;
  lp.equality = constraints.rows;
  lp.rhs.assign(constraints.rows.size(), 0.0);
  lp.equality.emplace_back(n, 1.0);
  lp.rhs.push_back(1.0);

  lp.cost.assign(payoff.begin(), payoff.end());
  const LPSolution lo = lp_solve(lp);
  for (double& c : lp.cost) c = -c;
  const LPSolution hi = lp_solve(lp);
  if (lo.status != LPStatus::kOptimal || hi.status != LPStatus::kOptimal)
    throw std::runtime_error("price bounds: martingale polytope is empty");
  return {lo.objective, -hi.objective};
}

Vector require_equivalent_mm(const Market& market, const PriorSet& priors, const UtilitySpec& utility) {
  const MartingaleConstraints constraints = build_constraints(market);
  auto q = find_equivalent_mm(constraints);
  if (!q) throw ValidationError("A3", "assumption A3 violated: no equivalent martingale measure (arbitrage)");
  if (!in_m_v(utility, priors, constraints, *q))
    throw ValidationError("A3", "assumption A3 violated: priors do not jointly charge every scenario");
  return *q;
}

}  // namespace rdual
