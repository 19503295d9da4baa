#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rdual/model.hpp"
#include "rdual/simplex.hpp"
#include "rdual/utility.hpp"

namespace rdual {

/// Linear description of the cone of (scaled) martingale measures on a
/// finite tree: q >= 0 with one equality per (non-terminal node, asset),
///   sum_{omega in node} q_omega (S^i_{t+1}(omega) - S^i_t(node)) = 0.
///
/// Row order is (t, cell, asset), the same order as Strategy::flatten(),
/// so the transpose of the row matrix maps holdings to terminal gains.
struct MartingaleConstraints {
  struct RowLabel {
    std::size_t time;
    std::size_t cell;
    std::size_t asset;
  };

  std::vector<Vector> rows;
  std::vector<RowLabel> labels;
  std::size_t scenario_count = 0;

  /// max_row |A q|.
  double residual(std::span<const double> q) const;
  /// A^T theta: terminal gains of a flat strategy.
  Vector gains(std::span<const double> flat_theta) const;
};

MartingaleConstraints build_constraints(const Market& market);

/// q >= 0 is a member of the cone iff |A q|_inf <= tol.
bool is_member(const MartingaleConstraints& constraints, std::span<const double> q, double tol = 1e-9);

/// Martingale probability maximising its smallest atom; nullopt when the
/// best achievable minimum is not above 1e-10 (no equivalent martingale
/// measure, i.e. arbitrage).
std::optional<Vector> find_equivalent_mm(const MartingaleConstraints& constraints);

/// Membership of a martingale probability in the dual domain: some
/// lambda > 0 and P in the hull with V(lambda q | P) < inf.
bool in_m_v(const UtilitySpec& utility, const PriorSet& priors, const MartingaleConstraints& constraints,
            std::span<const double> q);

/// [min, max] of E_Q[payoff] over martingale probabilities, via two LPs.
std::pair<double, double> martingale_price_bounds(const MartingaleConstraints& constraints,
                                                  std::span<const double> payoff);

/// Probes the no-arbitrage standing assumption: an equivalent martingale
/// measure exists and lies in the dual domain. Returns that measure, or
/// throws ValidationError("A3", ...).
Vector require_equivalent_mm(const Market& market, const PriorSet& priors, const UtilitySpec& utility);

}  // namespace rdual
