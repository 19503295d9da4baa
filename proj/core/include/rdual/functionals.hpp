#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rdual/model.hpp"
#include "rdual/utility.hpp"

namespace rdual {

/// Finite positive measure on the scenario space, stored as scenario masses
/// nu({omega}). Densities are formed on demand against whatever base measure
/// is needed.
class PositiveMeasure {
 public:
  explicit PositiveMeasure(Vector mass);

  static PositiveMeasure scaled(double lambda, std::span<const double> q);

  const Vector& mass() const noexcept { return mass_; }
  std::size_t size() const noexcept { return mass_.size(); }
  double total() const;
  double operator[](std::size_t omega) const { return mass_[omega]; }

 private:
  Vector mass_;
};

/// V(nu | P) = sum_omega P_omega V(nu_omega / P_omega), +inf unless nu << P.
double v_divergence(const UtilitySpec& utility, const PositiveMeasure& nu, std::span<const double> p);

struct FrankWolfeOptions {
  int max_iterations = 200;
  double gap_tolerance = 1e-9;
};

struct RobustDivergence {
  double value = kInf;
  Vector weights;   // mixture weights over prior vertices
  Vector measure;   // the minimising prior sum_k w_k P_k
  int iterations = 0;
  double fw_gap = kInf;  // certified bound on value - optimum
};

/// V(nu | priors) = inf over the hull of V(nu | P). Convex in the mixture
/// weights; minimised by pairwise Frank-Wolfe with exact line search.
RobustDivergence robust_v_divergence(const UtilitySpec& utility, const PositiveMeasure& nu,
                                     const PriorSet& priors, const FrankWolfeOptions& options = {});

/// Robust integral functional sup_P E_P[f(., X)] for the integrand
/// f(omega, x) = -U(-x + B(omega)).
double robust_integral(const UtilitySpec& utility, const PriorSet& priors, const Claim& claim,
                       std::span<const double> x);

/// Conjugate-side functional: V(nu | priors) + nu(B) when nu >= 0 and the
/// divergence is finite, +inf otherwise.
double dual_functional_j(const UtilitySpec& utility, const PriorSet& priors,
                         std::span<const double> nu, const Claim& claim);

struct ConjugateGridOptions {
  double x_max = 10.0;
  std::size_t coarse_points = 41;  // per axis on [-x_max, x_max]
  std::size_t window = 6;          // half-width, in cells, of each zoomed grid
  std::size_t refinements = 24;    // each one halves the spacing
  std::size_t max_scenarios = 6;
};

struct ConjugateCheckReport {
  double grid_sup = -kInf;   // sup over the grid of <X, nu> - I(X)
  double j_value = kInf;     // dual_functional_j(nu)
  Vector argmax;
  bool hit_boundary = false; // maximiser sits on the box boundary
  double young_excess() const { return grid_sup - j_value; }
  /// Both sides +inf, or the grid sup pinned to the box with J infinite.
  bool infinite_agreement() const { return j_value == kInf && hit_boundary; }
};

/// Brute-force conjugate of the robust integral functional on a zoomed grid
/// over [-x_max, x_max]^n, reported against J(nu). Throws for more than
/// `max_scenarios` scenarios.
ConjugateCheckReport conjugate_identity_check(const UtilitySpec& utility, const PriorSet& priors,
                                              const Claim& claim, std::span<const double> nu,
                                              const ConjugateGridOptions& options = {});

/// sup_k E_{P_k}[|X| 1{|X| >= N}] over the prior vertices.
double robust_ui_modulus(std::span<const double> x, const PriorSet& priors, double threshold);

/// sup_k E_m[|Y_k| 1{|Y_k| >= N}] for a finite family under one measure m.
double family_ui_modulus(const std::vector<Vector>& family, std::span<const double> measure,
                         double threshold);

}  // namespace rdual
