#pragma once

#include <cstddef>
#include <vector>

#include "rdual/model.hpp"

namespace rdual {

/// Single-asset tree where every node has one child per factor and the
/// child price is the parent price times that factor. Scenarios are the
/// factor sequences in lexicographic order, so there are
/// factors.size()^periods of them.
Market multiplicative_tree(double s0, const Vector& factors, std::size_t periods);

/// One-period market with d assets: terminal[omega] is the price vector in
/// scenario omega.
Market one_period_market(const Vector& s0, const std::vector<Vector>& terminal);

/// One-period binomial with s0 = 1, up = 2, down = 1/2: the unique
/// martingale measure puts 1/3 on the up state (scenario 0).
Market complete_binomial();

ScenarioSpace uniform_space(std::size_t n);

}  // namespace rdual
