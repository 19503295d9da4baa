#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace rdual {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ConjugateMode { kAnalytic, kNumeric };

/// Utility U on the whole real line together with its convex conjugate
/// V(y) = sup_x (U(x) - x y).
///
/// U must be strictly concave, increasing and C^1 with U'(-inf) = inf and
/// U'(+inf) = 0. The conjugate side is either given in closed form
/// (kAnalytic) or derived from U' by root finding (kNumeric). V(0) is
/// stored explicitly since it equals sup U and may be +inf.
class UtilitySpec {
 public:
  struct Functions {
    std::function<double(double)> u;
    std::function<double(double)> u_prime;
    std::function<double(double)> u_second;
    // Conjugate side on (0, inf). Left empty for numeric mode.
    std::function<double(double)> v;
    std::function<double(double)> v_prime;
    std::function<double(double)> v_second;
  };

  UtilitySpec(std::string name, Functions f, double v_at_zero, ConjugateMode mode);

  const std::string& name() const noexcept { return name_; }
  ConjugateMode mode() const noexcept { return mode_; }
  double v_at_zero() const noexcept { return v_at_zero_; }

  double u(double x) const { return f_.u(x); }
  double u_prime(double x) const { return f_.u_prime(x); }
  double u_second(double x) const { return f_.u_second(x); }

  /// V(y); +inf for y < 0 and V(0) for y == 0.
  double v(double y) const;
  /// V'(y) for y > 0; -inf at 0.
  double v_prime(double y) const;
  /// V''(y) for y > 0.
  double v_second(double y) const;

  /// Maximiser of x -> U(x) - x y, i.e. the root of U'(x) = y (y > 0).
  double marginal_inverse(double y) const;

  /// Same U, with the conjugate recomputed numerically from U'.
  UtilitySpec numeric() const;

 private:
  std::string name_;
  Functions f_;
  double v_at_zero_;
  ConjugateMode mode_;
};

/// U(x) = -exp(-a x) / a. With a = 1: V(y) = y ln y - y, V(0) = 0.
UtilitySpec exponential_utility(double risk_aversion = 1.0);

/// U(x) = 1 - e^{-x} for x <= 0 and 2 sqrt(x + 1) - 2 for x >= 0.
/// Unbounded above, so V(0) = +inf. Closed-form conjugate:
///   V(y) = 1 - y + y ln y      for y >= 1,
///   V(y) = 1/y + y - 2         for 0 < y <= 1.
UtilitySpec glued_utility();

/// One term c e^{-a x} of U'(x).
struct ExpTerm {
  double weight;
  double rate;
};

/// U(x) = -sum_i (c_i / a_i) e^{-a_i x}: a tabulated mixture of exponential
/// utilities. Has no closed-form conjugate, so it always runs in numeric mode.
UtilitySpec exponential_mixture_utility(std::vector<ExpTerm> terms);

/// Root of a strictly decreasing marginal utility: returns x with
/// u_prime(x) = y. The bracket grows geometrically from [-1, 1] and the
/// search refines by bisection to ~1e-13 relative width.
double invert_marginal(const std::function<double(double)>& u_prime, double y);

/// V(y); throws std::domain_error for y < 0.
double conjugate(const UtilitySpec& utility, double y);

/// Perspective z V(y / z) with the lower semicontinuous extension at z = 0:
/// 0 if y = z = 0 and +inf if y != 0, z = 0.
double perspective(const UtilitySpec& utility, double y, double z);

/// Partial derivatives of (y, z) -> z V(y / z) for y > 0, z > 0.
struct PerspectiveDerivatives {
  double value;
  double dy;
  double dz;
  // Hessian is (v2 / z) [[1, -r], [-r, r^2]] with r = y / z.
  double hyy;
  double hyz;
  double hzz;
};
PerspectiveDerivatives perspective_derivatives(const UtilitySpec& utility, double y, double z);

/// V(y) + x y - U(x) >= 0, zero iff y = U'(x).
double young_gap(const UtilitySpec& utility, double x, double y);

/// Numerical sanity checks of strict concavity, monotonicity and the Inada
/// limits at +/- x_max. Throws ValidationError("A2", ...) on failure.
void validate_utility(const UtilitySpec& utility, double x_max = 1e6);

}  // namespace rdual
