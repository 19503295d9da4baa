#pragma once

#include <cstdint>
#include <vector>

#include "rdual/model.hpp"

namespace rdual {

/// Reduced fraction num / den with den > 0.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Omega = {1, ..., n_max} with P({n}) = 2^{-n} / Z, Z = 1 - 2^{-n_max},
/// priors P_n = (1 - 1/n) delta_1 + (1/n) delta_n and W(n) = n.
/// Scenario index i stands for n = i + 1.
struct TruncatedCountableSpace {
  int n_max = 0;
  Vector weights;
  std::vector<Vector> priors;
  Vector w;
  double renormalizer = 1.0;  // Z

  /// dP_n / dP at the scenario `omega` (1-based).
  double density(int n, int omega) const;
};

/// Throws for n_max < 3 or n_max > 60.
TruncatedCountableSpace example1_build(int n_max);

/// Largest n_max for which the exact routines are available.
inline constexpr int kExactLimit = 30;

double example1_expected_w(const TruncatedCountableSpace& space, int n);
Fraction example1_expected_w_exact(int n_max, int n);

/// max_n E_{P_n}[W 1{W >= N}].
double example1_tail_modulus(const TruncatedCountableSpace& space, double threshold);
Fraction example1_tail_modulus_exact(int n_max, std::int64_t threshold);

/// sup_n E[(dP_n/dP) 1{dP_n/dP >= N}] by direct summation.
double example1_priors_ui_modulus(const TruncatedCountableSpace& space, double threshold);
Fraction example1_priors_ui_modulus_exact(int n_max, std::int64_t threshold);

/// 1 / n_N with n_N = min{n <= n_max : c 2^n / n >= N}, 0 if no such n.
/// c = Z when `truncated`, c = 1 for the untruncated closed form.
Fraction example1_priors_ui_formula(int n_max, std::int64_t threshold, bool truncated);

struct Example2Row {
  double threshold;
  double modulus_gamma;  // X = gamma
  double modulus_one;    // X = 1
  double modulus_zero;   // X = 0
};

struct Example2Report {
  double gamma = 0.0;
  std::vector<Example2Row> rows;
  bool gamma_nonincreasing = false;
  bool gamma_vanishes = false;  // last row is 0
  bool one_constant = false;    // all X = 1 rows equal 1
};

/// Robust ui-modulus of f(., X) = W^X over the priors for constant X,
/// thresholds N = 2..n_max.
Example2Report example2_membership(const TruncatedCountableSpace& space, double gamma);

}  // namespace rdual
