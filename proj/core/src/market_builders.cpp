#include "rdual/market_builders.hpp"

#include <stdexcept>

namespace rdual {

Market multiplicative_tree(double s0, const Vector& factors, std::size_t periods) {
  if (factors.size() < 2) throw std::invalid_argument("multiplicative_tree: need at least two factors");
  if (periods == 0) throw std::invalid_argument("multiplicative_tree: need at least one period");
  const std::size_t b = factors.size();
  std::size_t n = 1;
  for (std::size_t t = 0; t < periods; ++t) n *= b;

  std::vector<Partition> levels;
  std::vector<std::vector<Vector>> prices;
  std::vector<double> node_price{s0};
  for (std::size_t t = 0; t <= periods; ++t) {
    // level t has b^t cells, each a contiguous block of scenarios
    const std::size_t cells = node_price.size();
    const std::size_t width = n / cells;
    Partition level;
    std::vector<Vector> px;
    for (std::size_t c = 0; c < cells; ++c) {
      Cell cell;
      for (std::size_t i = 0; i < width; ++i) cell.push_back(c * width + i);
      level.push_back(std::move(cell));
      px.push_back({node_price[c]});
    }
    levels.push_back(std::move(level));
    prices.push_back(std::move(px));
    if (t == periods) break;
    std::vector<double> next;
    for (double s : node_price)
      for (double f : factors) next.push_back(s * f);
    node_price = std::move(next);
  }
  return Market(FiltrationTree(std::move(levels)), 1, std::move(prices));
}

Market one_period_market(const Vector& s0, const std::vector<Vector>& terminal) {
  const std::size_t n = terminal.size();
  if (n == 0) throw std::invalid_argument("one_period_market: no scenarios");
  Cell all;
  Partition last;
  std::vector<Vector> px;
  for (std::size_t i = 0; i < n; ++i) {
    all.push_back(i);
    last.push_back({i});
    px.push_back(terminal[i]);
  }
  return Market(FiltrationTree({{all}, last}), s0.size(), {{s0}, px});
}

Market complete_binomial() { return multiplicative_tree(1.0, {2.0, 0.5}, 1); }

ScenarioSpace uniform_space(std::size_t n) { return ScenarioSpace(Vector(n, 1.0 / static_cast<double>(n))); }

}  // namespace rdual
