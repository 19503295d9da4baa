#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rdual/model.hpp"
#include "rdual/utility.hpp"

namespace rdual::testing {

struct Instance {
  std::string name;
  ScenarioModel model;
  PriorSet priors;
  UtilitySpec utility;
  bool exponential;
};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

/// Random probability vector with every entry at least `floor`.
Vector random_probability(std::mt19937_64& rng, std::size_t n, double floor);

/// 24 arbitrage-free instances cycling through six market shapes (2 to 8
/// scenarios), EXP and GLUED utilities and 1 to 4 prior vertices, with
/// claims in [-3, 3]. Same seed, same suite.
std::vector<Instance> generate_suite(std::uint64_t seed);

}  // namespace rdual::testing
