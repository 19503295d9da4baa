#include "rdual/countable_examples.hpp"

#include <boost/rational.hpp>
#include <cmath>
#include <stdexcept>

#include "rdual/functionals.hpp"

namespace rdual {

namespace {

using Rational = boost::rational<std::int64_t>;

Fraction to_fraction(const Rational& r) { return {r.numerator(), r.denominator()}; }

void require_exact(int n_max) {
  if (n_max < 3 || n_max > kExactLimit)
    throw std::invalid_argument("exact mode needs 3 <= n_max <= " + std::to_string(kExactLimit));
}

void require_index(int n_max, int n) {
  if (n < 1 || n > n_max) throw std::out_of_range("prior index outside 1..n_max");
}

// P_n as rationals on {1, ..., n_max}.
std::vector<Rational> prior_exact(int n_max, int n) {
  std::vector<Rational> p(static_cast<std::size_t>(n_max), Rational(0));
  p[0] += Rational(n - 1, n);
  p[static_cast<std::size_t>(n - 1)] += Rational(1, n);
  return p;
}

// Reference weight 2^{-m} / Z = 2^{n_max - m} / (2^{n_max} - 1).
Rational reference_exact(int n_max, int m) {
  const std::int64_t full = std::int64_t{1} << n_max;
  return Rational(std::int64_t{1} << (n_max - m), full - 1);
}

}  // namespace

double TruncatedCountableSpace::density(int n, int omega) const {
  require_index(n_max, n);
  require_index(n_max, omega);
  return priors[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(omega - 1)] /
         weights[static_cast<std::size_t>(omega - 1)];
}

TruncatedCountableSpace example1_build(int n_max) {
  if (n_max < 3 || n_max > 60) throw std::invalid_argument("example1_build: n_max must lie in [3, 60]");
  TruncatedCountableSpace s;
  s.n_max = n_max;
  const std::size_t size = static_cast<std::size_t>(n_max);
  s.renormalizer = 1.0 - std::ldexp(1.0, -n_max);
  s.weights.resize(size);
  s.w.resize(size);
  for (int m = 1; m <= n_max; ++m) {
    s.weights[static_cast<std::size_t>(m - 1)] = std::ldexp(1.0, -m) / s.renormalizer;
    s.w[static_cast<std::size_t>(m - 1)] = m;
  }
  for (int n = 1; n <= n_max; ++n) {
    Vector p(size, 0.0);
    p[0] += 1.0 - 1.0 / n;
    p[static_cast<std::size_t>(n - 1)] += 1.0 / n;
    s.priors.push_back(std::move(p));
  }
  return s;
}

double example1_expected_w(const TruncatedCountableSpace& space, int n) {
  require_index(space.n_max, n);
  return expectation(space.priors[static_cast<std::size_t>(n - 1)], space.w);
}

Fraction example1_expected_w_exact(int n_max, int n) {
  require_exact(n_max);
  require_index(n_max, n);
  const auto p = prior_exact(n_max, n);
  Rational e(0);
  for (int m = 1; m <= n_max; ++m) e += p[static_cast<std::size_t>(m - 1)] * m;
  return to_fraction(e);
}

double example1_tail_modulus(const TruncatedCountableSpace& space, double threshold) {
  return robust_ui_modulus(space.w, PriorSet(space.priors), threshold);
}

Fraction example1_tail_modulus_exact(int n_max, std::int64_t threshold) {
  require_exact(n_max);
  Rational best(0);
  for (int n = 1; n <= n_max; ++n) {
    const auto p = prior_exact(n_max, n);
    Rational s(0);
    for (int m = 1; m <= n_max; ++m)
      if (m >= threshold) s += p[static_cast<std::size_t>(m - 1)] * m;
    best = std::max(best, s);
  }
  return to_fraction(best);
}

double example1_priors_ui_modulus(const TruncatedCountableSpace& space, double threshold) {
  std::vector<Vector> family;
  for (int n = 1; n <= space.n_max; ++n) {
    Vector d(static_cast<std::size_t>(space.n_max));
    for (int m = 1; m <= space.n_max; ++m) d[static_cast<std::size_t>(m - 1)] = space.density(n, m);
    family.push_back(std::move(d));
  }
  return family_ui_modulus(family, space.weights, threshold);
}

Fraction example1_priors_ui_modulus_exact(int n_max, std::int64_t threshold) {
  require_exact(n_max);
  Rational best(0);
  for (int n = 1; n <= n_max; ++n) {
    const auto p = prior_exact(n_max, n);
    Rational s(0);
    for (int m = 1; m <= n_max; ++m) {
      const Rational pm = p[static_cast<std::size_t>(m - 1)];
      if (pm.numerator() == 0) continue;
      const Rational ref = reference_exact(n_max, m);
      // E[(dP/dP0) 1{dP/dP0 >= N}] = P_n(dP/dP0 >= N)
      if (pm / ref >= Rational(threshold)) s += pm;
    }
    best = std::max(best, s);
  }
  return to_fraction(best);
}

Fraction example1_priors_ui_formula(int n_max, std::int64_t threshold, bool truncated) {
  require_exact(n_max);
  const std::int64_t full = std::int64_t{1} << n_max;
  const Rational z = truncated ? Rational(full - 1, full) : Rational(1);
  for (int n = 1; n <= n_max; ++n)
    if (z * Rational(std::int64_t{1} << n, n) >= Rational(threshold)) return {1, n};
  return {0, 1};
}

Example2Report example2_membership(const TruncatedCountableSpace& space, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("example2_membership: gamma must lie in (0, 1)");
  const PriorSet priors(space.priors);
  auto power = [&](double x) {
    Vector f(space.w.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(space.w[i], x);
    return f;
  };
  const Vector fg = power(gamma);
  const Vector f1 = power(1.0);
  const Vector f0 = power(0.0);

  Example2Report r;
  r.gamma = gamma;
  r.gamma_nonincreasing = true;
  r.one_constant = true;
  for (int n = 2; n <= space.n_max; ++n) {
    const double t = n;
    Example2Row row{t, robust_ui_modulus(fg, priors, t), robust_ui_modulus(f1, priors, t),
                    robust_ui_modulus(f0, priors, t)};
    if (!r.rows.empty() && row.modulus_gamma > r.rows.back().modulus_gamma) r.gamma_nonincreasing = false;
    if (std::abs(row.modulus_one - 1.0) > 1e-12) r.one_constant = false;
    r.rows.push_back(row);
  }
  r.gamma_vanishes = !r.rows.empty() && r.rows.back().modulus_gamma == 0.0;
  return r;
}

}  // namespace rdual
