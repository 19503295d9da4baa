#include "rdual/utility.hpp"

#include <cmath>
#include <stdexcept>

#include "rdual/model.hpp"

namespace rdual {

namespace {

// Bracket growth stops here; beyond it U'(x) is taken to never reach y.
constexpr double kBracketCap = 1e15;

std::function<double(double)> finite_difference(std::function<double(double)> g) {
  return [g = std::move(g)](double x) {
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    return (g(x + h) - g(x - h)) / (2.0 * h);
  };
}

}  // namespace

UtilitySpec::UtilitySpec(std::string name, Functions f, double v_at_zero, ConjugateMode mode)
    : name_(std::move(name)), f_(std::move(f)), v_at_zero_(v_at_zero), mode_(mode) {
  if (!f_.u || !f_.u_prime) throw std::invalid_argument("utility needs U and U'");
  if (!f_.u_second) f_.u_second = finite_difference(f_.u_prime);
  if (mode_ == ConjugateMode::kAnalytic && (!f_.v || !f_.v_prime || !f_.v_second))
    throw std::invalid_argument("analytic utility needs V, V' and V''");
}

double UtilitySpec::marginal_inverse(double y) const { return invert_marginal(f_.u_prime, y); }

double UtilitySpec::v(double y) const {
  if (y < 0.0) return kInf;
  if (y == 0.0) return v_at_zero_;
  if (mode_ == ConjugateMode::kAnalytic) return f_.v(y);
  const double x = marginal_inverse(y);
  return f_.u(x) - x * y;
}

double UtilitySpec::v_prime(double y) const {
  if (y <= 0.0) return -kInf;
  if (mode_ == ConjugateMode::kAnalytic) return f_.v_prime(y);
  // Envelope theorem: V'(y) = -x*(y).
  return -marginal_inverse(y);
}

double UtilitySpec::v_second(double y) const {
  if (y <= 0.0) return kInf;
  if (mode_ == ConjugateMode::kAnalytic) return f_.v_second(y);
  return -1.0 / f_.u_second(marginal_inverse(y));
}

UtilitySpec UtilitySpec::numeric() const {
  Functions f{f_.u, f_.u_prime, f_.u_second, {}, {}, {}};
  return UtilitySpec(name_, std::move(f), v_at_zero_, ConjugateMode::kNumeric);
}

UtilitySpec exponential_utility(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("risk aversion must be positive");
  UtilitySpec::Functions f;
  f.u = [a](double x) { return -std::exp(-a * x) / a; };
  f.u_prime = [a](double x) { return std::exp(-a * x); };
  f.u_second = [a](double x) { return -a * std::exp(-a * x); };
  f.v = [a](double y) { return (y * std::log(y) - y) / a; };
  f.v_prime = [a](double y) { return std::log(y) / a; };
  f.v_second = [a](double y) { return 1.0 / (a * y); };
  return UtilitySpec("EXP", std::move(f), 0.0, ConjugateMode::kAnalytic);
}

UtilitySpec glued_utility() {
  UtilitySpec::Functions f;
  f.u = [](double x) { return x <= 0.0 ? 1.0 - std::exp(-x) : 2.0 * std::sqrt(x + 1.0) - 2.0; };
  f.u_prime = [](double x) { return x <= 0.0 ? std::exp(-x) : 1.0 / std::sqrt(x + 1.0); };
  f.u_second = [](double x) {
    return x <= 0.0 ? -std::exp(-x) : -0.5 / ((x + 1.0) * std::sqrt(x + 1.0));
  };
  // U'(x) >= 1 exactly on x <= 0, so y >= 1 selects the exponential branch.
  f.v = [](double y) { return y >= 1.0 ? 1.0 - y + y * std::log(y) : 1.0 / y + y - 2.0; };
  f.v_prime = [](double y) { return y >= 1.0 ? std::log(y) : 1.0 - 1.0 / (y * y); };
  f.v_second = [](double y) { return y >= 1.0 ? 1.0 / y : 2.0 / (y * y * y); };
  return UtilitySpec("GLUED", std::move(f), kInf, ConjugateMode::kAnalytic);
}

UtilitySpec exponential_mixture_utility(std::vector<ExpTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("exponential mixture needs at least one term");
  for (const ExpTerm& t : terms) {
    if (!(t.weight > 0.0) || !(t.rate > 0.0) || !std::isfinite(t.weight) || !std::isfinite(t.rate))
      throw std::invalid_argument("exponential mixture terms need positive weight and rate");
  }
  UtilitySpec::Functions f;
  f.u = [terms](double x) {
    double s = 0.0;
    for (const ExpTerm& t : terms) s -= t.weight / t.rate * std::exp(-t.rate * x);
    return s;
  };
  f.u_prime = [terms](double x) {
    double s = 0.0;
    for (const ExpTerm& t : terms) s += t.weight * std::exp(-t.rate * x);
    return s;
  };
  f.u_second = [terms](double x) {
    double s = 0.0;
    for (const ExpTerm& t : terms) s -= t.weight * t.rate * std::exp(-t.rate * x);
    return s;
  };
  return UtilitySpec("custom-table", std::move(f), 0.0, ConjugateMode::kNumeric);
}

double invert_marginal(const std::function<double(double)>& u_prime, double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw std::domain_error("marginal inverse needs 0 < y < inf");
  double lo = -1.0;
  double hi = 1.0;
  // U' is decreasing: need U'(lo) >= y >= U'(hi).
  while (u_prime(hi) > y) {
    lo = hi;
    hi *= 2.0;
    if (hi > kBracketCap) throw std::domain_error("marginal inverse: root beyond bracket cap");
  }
  while (u_prime(lo) < y) {
    hi = lo;
    lo *= 2.0;
    if (lo < -kBracketCap) throw std::domain_error("marginal inverse: root beyond bracket cap");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
    if (u_prime(mid) > y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double conjugate(const UtilitySpec& utility, double y) {
  if (y < 0.0) throw std::domain_error("conjugate is +inf on y < 0");
  return utility.v(y);
}

double perspective(const UtilitySpec& utility, double y, double z) {
  if (z < 0.0) throw std::domain_error("perspective needs z >= 0");
  if (z == 0.0) return y == 0.0 ? 0.0 : kInf;
  if (y < 0.0) return kInf;
  const double v = utility.v(y / z);
  if (v == kInf) return kInf;
  return z * v;
}

PerspectiveDerivatives perspective_derivatives(const UtilitySpec& utility, double y, double z) {
  const double r = y / z;
  const double v = utility.v(r);
  const double v1 = utility.v_prime(r);
  const double v2 = utility.v_second(r);
  const double c = v2 / z;
  return {z * v, v1, v - r * v1, c, -r * c, r * r * c};
}

double young_gap(const UtilitySpec& utility, double x, double y) {
  return conjugate(utility, y) + x * y - utility.u(x);
}

void validate_utility(const UtilitySpec& utility, double x_max) {
  constexpr double kEps = 1e-2;
  const double left = utility.u_prime(-x_max);
  const double right = utility.u_prime(x_max);
  if (!(left > 1.0 / kEps))
    throw ValidationError("A2", "utility " + utility.name() + " violates U'(-inf) = inf");
  if (!(right < kEps) || !(right >= 0.0))
    throw ValidationError("A2", "utility " + utility.name() + " violates U'(+inf) = 0");
  double prev = kInf;
  for (int i = -40; i <= 40; ++i) {
    const double x = 0.25 * i;
    const double d = utility.u_prime(x);
    if (!(d > 0.0)) throw ValidationError("A2", "utility " + utility.name() + " is not increasing");
    if (!(d < prev)) throw ValidationError("A2", "utility " + utility.name() + " is not strictly concave");
    prev = d;
  }
}

}  // namespace rdual
