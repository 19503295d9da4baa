#include "rdual/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rdual/utility.hpp"

namespace rdual {

namespace {

constexpr double kSumTolerance = 1e-12;

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

ScenarioSpace::ScenarioSpace(Vector weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ValidationError("P", "reference measure has no scenarios");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw ValidationError("P", "reference weight " + std::to_string(i) +
                                     " is not strictly positive (full support required)");
  }
  if (std::abs(sum(weights_) - 1.0) > kSumTolerance)
    throw ValidationError("P", "reference weights do not sum to 1");
}

FiltrationTree::FiltrationTree(std::vector<Partition> levels) : levels_(std::move(levels)) {
  if (levels_.size() < 2) throw std::invalid_argument("filtration needs at least two levels (T >= 1)");
  if (levels_.front().size() != 1) throw std::invalid_argument("level 0 must be a single cell");
  const std::size_t n = levels_.front().front().size();
  if (n == 0) throw std::invalid_argument("filtration over an empty scenario set");

  cell_of_.assign(levels_.size(), std::vector<std::size_t>(n, std::numeric_limits<std::size_t>::max()));
  for (std::size_t t = 0; t < levels_.size(); ++t) {
    for (std::size_t c = 0; c < levels_[t].size(); ++c) {
      if (levels_[t][c].empty())
        throw std::invalid_argument("empty cell at level " + std::to_string(t));
      for (std::size_t omega : levels_[t][c]) {
        if (omega >= n)
          throw std::invalid_argument("scenario index out of range at level " + std::to_string(t));
        if (cell_of_[t][omega] != std::numeric_limits<std::size_t>::max())
          throw std::invalid_argument("scenario " + std::to_string(omega) +
                                      " appears twice at level " + std::to_string(t));
        cell_of_[t][omega] = c;
      }
    }
    for (std::size_t omega = 0; omega < n; ++omega) {
      if (cell_of_[t][omega] == std::numeric_limits<std::size_t>::max())
        throw std::invalid_argument("scenario " + std::to_string(omega) +
                                    " missing at level " + std::to_string(t));
    }
  }
  // Refinement: scenarios sharing a cell at t+1 share a cell at t.
  for (std::size_t t = 0; t + 1 < levels_.size(); ++t) {
    for (const Cell& cell : levels_[t + 1]) {
      const std::size_t parent = cell_of_[t][cell.front()];
      for (std::size_t omega : cell) {
        if (cell_of_[t][omega] != parent)
          throw std::invalid_argument("level " + std::to_string(t + 1) + " does not refine level " +
                                      std::to_string(t));
      }
    }
  }
  for (const Cell& cell : levels_.back()) {
    if (cell.size() != 1) throw std::invalid_argument("terminal level must consist of singletons");
  }
}

Market::Market(FiltrationTree tree, std::size_t asset_count, std::vector<std::vector<Vector>> prices)
    : tree_(std::move(tree)), asset_count_(asset_count), prices_(std::move(prices)) {
  if (asset_count_ == 0) throw std::invalid_argument("market needs at least one asset");
  if (prices_.size() != tree_.levels().size())
    throw std::invalid_argument("prices must be given for every time 0..T");
  for (std::size_t t = 0; t < prices_.size(); ++t) {
    if (prices_[t].size() != tree_.cell_count(t))
      throw std::invalid_argument("prices at time " + std::to_string(t) + " need one vector per cell");
    for (const Vector& p : prices_[t]) {
      if (p.size() != asset_count_)
        throw std::invalid_argument("price vector at time " + std::to_string(t) + " has wrong dimension");
      for (double v : p)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite price");
    }
  }
  for (std::size_t t = 0; t < tree_.horizon(); ++t) decision_count_ += tree_.cell_count(t) * asset_count_;
}

std::span<const double> Market::price(std::size_t t, std::size_t cell) const {
  return prices_.at(t).at(cell);
}

double Market::price_at(std::size_t t, std::size_t omega, std::size_t i) const {
  return prices_.at(t).at(tree_.cell_of(t, omega)).at(i);
}

Claim::Claim(Vector payoff) : payoff_(std::move(payoff)) {
  for (double v : payoff_)
    if (!std::isfinite(v)) throw std::invalid_argument("claim payoff must be finite");
}

Claim Claim::shifted(double c) const {
  Vector out = payoff_;
  for (double& v : out) v += c;
  return Claim(std::move(out));
}

Claim Claim::scaled(double c) const {
  Vector out = payoff_;
  for (double& v : out) v *= c;
  return Claim(std::move(out));
}

PriorSet::PriorSet(std::vector<Vector> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw ValidationError("A1", "prior set has no vertices");
  const std::size_t n = vertices_.front().size();
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    const Vector& v = vertices_[k];
    if (v.size() != n || n == 0)
      throw ValidationError("A1", "prior vertex " + std::to_string(k) + " has wrong dimension");
    for (double p : v) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw ValidationError("A1", "prior vertex " + std::to_string(k) + " has a negative entry");
    }
    if (std::abs(sum(v) - 1.0) > kSumTolerance)
      throw ValidationError("A1", "prior vertex " + std::to_string(k) + " does not sum to 1");
  }
}

Vector PriorSet::mixture(std::span<const double> weights) const {
  if (weights.size() != vertices_.size()) throw std::invalid_argument("mixture weight dimension mismatch");
  Vector out(scenario_count(), 0.0);
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    if (weights[k] == 0.0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights[k] * vertices_[k][i];
  }
  return out;
}

Vector PriorSet::average() const {
  const Vector w(vertices_.size(), 1.0 / static_cast<double>(vertices_.size()));
  return mixture(w);
}

Strategy Strategy::zero(const Market& market) {
  std::vector<std::vector<Vector>> h(market.horizon());
  for (std::size_t t = 0; t < market.horizon(); ++t)
    h[t].assign(market.tree().cell_count(t), Vector(market.asset_count(), 0.0));
  return Strategy(std::move(h));
}

Strategy Strategy::from_flat(const Market& market, std::span<const double> flat) {
  if (flat.size() != market.decision_count()) throw std::invalid_argument("flat strategy has wrong size");
  Strategy s = zero(market);
  std::size_t k = 0;
  for (auto& level : s.holdings_)
    for (auto& v : level)
      for (double& x : v) x = flat[k++];
  return s;
}

Vector Strategy::flatten() const {
  Vector out;
  for (const auto& level : holdings_)
    for (const auto& v : level) out.insert(out.end(), v.begin(), v.end());
  return out;
}

Strategy Strategy::operator+(const Strategy& other) const {
  if (other.holdings_.size() != holdings_.size()) throw std::invalid_argument("strategy shape mismatch");
  Strategy out = *this;
  for (std::size_t t = 0; t < holdings_.size(); ++t) {
    if (other.holdings_[t].size() != holdings_[t].size()) throw std::invalid_argument("strategy shape mismatch");
    for (std::size_t c = 0; c < holdings_[t].size(); ++c) {
      if (other.holdings_[t][c].size() != holdings_[t][c].size())
        throw std::invalid_argument("strategy shape mismatch");
      for (std::size_t i = 0; i < holdings_[t][c].size(); ++i)
        out.holdings_[t][c][i] += other.holdings_[t][c][i];
    }
  }
  return out;
}

Strategy Strategy::operator*(double c) const {
  Strategy out = *this;
  for (auto& level : out.holdings_)
    for (auto& v : level)
      for (double& x : v) x *= c;
  return out;
}

ScenarioModel::ScenarioModel(ScenarioSpace space_, Market market_, Claim claim_)
    : space(std::move(space_)), market(std::move(market_)), claim(std::move(claim_)) {
  if (market.scenario_count() != space.size())
    throw std::invalid_argument("market tree and scenario space disagree on scenario count");
  if (claim.size() != space.size()) throw std::invalid_argument("claim has wrong dimension");
}

Vector terminal_gain(const Market& market, const Strategy& theta) {
  const auto& h = theta.holdings();
  const FiltrationTree& tree = market.tree();
  if (h.size() != market.horizon()) throw std::invalid_argument("strategy horizon mismatch");
  for (std::size_t t = 0; t < h.size(); ++t) {
    if (h[t].size() != tree.cell_count(t)) throw std::invalid_argument("strategy cell count mismatch");
    for (const Vector& v : h[t])
      if (v.size() != market.asset_count()) throw std::invalid_argument("strategy asset count mismatch");
  }

  Vector gain(market.scenario_count(), 0.0);
  for (std::size_t omega = 0; omega < gain.size(); ++omega) {
    double g = 0.0;
    for (std::size_t t = 0; t < h.size(); ++t) {
      const auto now = market.price(t, tree.cell_of(t, omega));
      const auto next = market.price(t + 1, tree.cell_of(t + 1, omega));
      const Vector& pos = h[t][tree.cell_of(t, omega)];
      for (std::size_t i = 0; i < pos.size(); ++i) g += pos[i] * (next[i] - now[i]);
    }
    gain[omega] = g;
  }
  return gain;
}

double expectation(std::span<const double> measure, std::span<const double> x) {
  if (measure.size() != x.size()) throw std::invalid_argument("expectation: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (measure[i] == 0.0) continue;  // 0 * anything = 0
    s += measure[i] * x[i];
  }
  return s;
}

void check_compatible(const ScenarioModel& model, const PriorSet& priors) {
  if (priors.scenario_count() != model.scenario_count())
    throw std::invalid_argument("prior vertices and model disagree on scenario count");
}

double worst_case_expected_utility(const ScenarioModel& model, const PriorSet& priors,
                                   const UtilitySpec& utility, const Strategy& theta) {
  check_compatible(model, priors);
  const Vector gain = terminal_gain(model.market, theta);
  Vector u(gain.size());
  for (std::size_t i = 0; i < gain.size(); ++i) u[i] = utility.u(gain[i] + model.claim[i]);
  double worst = std::numeric_limits<double>::infinity();
  for (const Vector& p : priors.vertices()) worst = std::min(worst, expectation(p, u));
  return worst;
}

}  // namespace rdual
