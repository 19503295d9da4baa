#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdual {

using Vector = std::vector<double>;

/// Raised when input data violates one of the standing assumptions
/// (full-support reference measure, prior polytope, no-arbitrage, ...).
/// `assumption()` carries a short tag such as "A1" or "A3".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string assumption, const std::string& what)
      : std::invalid_argument(what), assumption_(std::move(assumption)) {}

  const std::string& assumption() const noexcept { return assumption_; }

 private:
  std::string assumption_;
};

/// Finite probability space carrying the reference measure.
class ScenarioSpace {
 public:
  explicit ScenarioSpace(Vector weights);

  std::size_t size() const noexcept { return weights_.size(); }
  const Vector& weights() const noexcept { return weights_; }
  double weight(std::size_t omega) const { return weights_.at(omega); }

 private:
  Vector weights_;
};

/// A cell is a set of scenario indices; a level is a partition of the
/// scenario space. Level 0 is the trivial partition, the last level is
/// made of singletons, and every level refines the previous one.
using Cell = std::vector<std::size_t>;
using Partition = std::vector<Cell>;

class FiltrationTree {
 public:
  explicit FiltrationTree(std::vector<Partition> levels);

  /// Number of trading periods T (levels are indexed 0..T).
  std::size_t horizon() const noexcept { return levels_.size() - 1; }
  std::size_t scenario_count() const noexcept { return cell_of_.front().size(); }
  const std::vector<Partition>& levels() const noexcept { return levels_; }
  const Partition& level(std::size_t t) const { return levels_.at(t); }
  std::size_t cell_count(std::size_t t) const { return levels_.at(t).size(); }
  std::size_t cell_of(std::size_t t, std::size_t omega) const { return cell_of_.at(t).at(omega); }

 private:
  std::vector<Partition> levels_;
  std::vector<std::vector<std::size_t>> cell_of_;
};

/// Adapted d-dimensional price process on a filtration tree:
/// `prices[t][cell]` is the price vector shared by every scenario of the cell.
class Market {
 public:
  Market(FiltrationTree tree, std::size_t asset_count,
         std::vector<std::vector<Vector>> prices);

  const FiltrationTree& tree() const noexcept { return tree_; }
  std::size_t asset_count() const noexcept { return asset_count_; }
  std::size_t horizon() const noexcept { return tree_.horizon(); }
  std::size_t scenario_count() const noexcept { return tree_.scenario_count(); }
  const std::vector<std::vector<Vector>>& prices() const noexcept { return prices_; }
  std::span<const double> price(std::size_t t, std::size_t cell) const;

  /// Price of asset `i` seen in scenario `omega` at time `t`.
  double price_at(std::size_t t, std::size_t omega, std::size_t i) const;

  /// Number of trading decisions (non-terminal nodes times assets).
  std::size_t decision_count() const noexcept { return decision_count_; }

 private:
  FiltrationTree tree_;
  std::size_t asset_count_;
  std::vector<std::vector<Vector>> prices_;
  std::size_t decision_count_ = 0;
};

/// Terminal payoff of the endowment, indexed by scenario.
class Claim {
 public:
  Claim() = default;
  explicit Claim(Vector payoff);

  static Claim zero(std::size_t n) { return Claim(Vector(n, 0.0)); }

  const Vector& payoff() const noexcept { return payoff_; }
  std::size_t size() const noexcept { return payoff_.size(); }
  double operator[](std::size_t omega) const { return payoff_[omega]; }

  Claim shifted(double c) const;
  Claim scaled(double c) const;

 private:
  Vector payoff_;
};

/// Ambiguity polytope, stored as the convex hull of probability vectors.
class PriorSet {
 public:
  explicit PriorSet(std::vector<Vector> vertices);

  static PriorSet singleton(Vector p) { return PriorSet({std::move(p)}); }

  std::size_t size() const noexcept { return vertices_.size(); }
  std::size_t scenario_count() const noexcept { return vertices_.front().size(); }
  const std::vector<Vector>& vertices() const noexcept { return vertices_; }
  const Vector& vertex(std::size_t k) const { return vertices_.at(k); }

  /// Mixture sum_k w_k P_k.
  Vector mixture(std::span<const double> weights) const;
  /// Uniform vertex average; its support is the union of vertex supports.
  Vector average() const;

 private:
  std::vector<Vector> vertices_;
};

/// Predictable holdings: `holdings[t][cell]` is the d-vector held over
/// (t, t+1] in every scenario of `cell` at level t, for t = 0..T-1.
class Strategy {
 public:
  Strategy() = default;
  explicit Strategy(std::vector<std::vector<Vector>> holdings)
      : holdings_(std::move(holdings)) {}

  static Strategy zero(const Market& market);
  /// Rebuilds a strategy from the flat (t, cell, asset) ordering used by
  /// the martingale constraint rows.
  static Strategy from_flat(const Market& market, std::span<const double> flat);

  const std::vector<std::vector<Vector>>& holdings() const noexcept { return holdings_; }
  Vector flatten() const;

  Strategy operator+(const Strategy& other) const;
  Strategy operator*(double c) const;

 private:
  std::vector<std::vector<Vector>> holdings_;
};

/// Market plus reference measure and claim. Immutable after construction.
struct ScenarioModel {
  ScenarioModel(ScenarioSpace space_, Market market_, Claim claim_);

  ScenarioSpace space;
  Market market;
  Claim claim;

  std::size_t scenario_count() const noexcept { return space.size(); }
  ScenarioModel with_claim(Claim c) const { return ScenarioModel(space, market, std::move(c)); }
};

class UtilitySpec;

/// Stochastic integral sum_t theta_t . (S_{t+1} - S_t), per scenario.
Vector terminal_gain(const Market& market, const Strategy& theta);

double expectation(std::span<const double> measure, std::span<const double> x);

/// inf over the prior polytope of E_P[U(theta.S_T + B)], evaluated as a
/// scan over vertices since the map P -> E_P[.] is linear.
double worst_case_expected_utility(const ScenarioModel& model, const PriorSet& priors,
                                   const UtilitySpec& utility, const Strategy& theta);

/// Checks that a prior set lives on the model's scenario space.
void check_compatible(const ScenarioModel& model, const PriorSet& priors);

}  // namespace rdual
