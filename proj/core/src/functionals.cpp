#include "rdual/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rdual {

PositiveMeasure::PositiveMeasure(Vector mass) : mass_(std::move(mass)) {
  for (double m : mass_)
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("positive measure needs finite masses >= 0");
}

PositiveMeasure PositiveMeasure::scaled(double lambda, std::span<const double> q) {
  Vector m(q.begin(), q.end());
  for (double& x : m) x *= lambda;
  return PositiveMeasure(std::move(m));
}

double PositiveMeasure::total() const { return std::accumulate(mass_.begin(), mass_.end(), 0.0); }

double v_divergence(const UtilitySpec& utility, const PositiveMeasure& nu, std::span<const double> p) {
  if (p.size() != nu.size()) throw std::invalid_argument("v_divergence: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double term = perspective(utility, nu[i], p[i]);
    if (term == kInf) return kInf;
    s += term;
  }
  return s;
}

namespace {

// d/dz of z V(y / z) at z > 0.
double perspective_dz(const UtilitySpec& utility, double y, double z) {
  if (y == 0.0) return utility.v_at_zero();
  if (z <= 0.0) return -kInf;
  const double r = y / z;
  return utility.v(r) - r * utility.v_prime(r);
}

class DivergenceOverHull {
 public:
  DivergenceOverHull(const UtilitySpec& utility, const PositiveMeasure& nu, const PriorSet& priors)
      : utility_(utility), nu_(nu), priors_(priors) {}

  Vector base(std::span<const double> w) const { return priors_.mixture(w); }

  double value(std::span<const double> b) const { return v_divergence(utility_, nu_, b); }

  // Gradient with respect to mixture weights, restricted to `allowed`.
  Vector gradient(std::span<const double> b, const std::vector<bool>& allowed) const {
    Vector dz(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) dz[i] = perspective_dz(utility_, nu_[i], b[i]);
    Vector g(priors_.size(), kInf);
    for (std::size_t k = 0; k < priors_.size(); ++k) {
      if (!allowed[k]) continue;
      double s = 0.0;
      const Vector& pk = priors_.vertex(k);
      for (std::size_t i = 0; i < b.size(); ++i)
        if (pk[i] != 0.0) s += dz[i] * pk[i];
      g[k] = s;
    }
    return g;
  }

  // Derivative of gamma -> F(b + gamma d); +inf when some nu-charged
  // coordinate of the base has hit zero.
  double slope(std::span<const double> b, std::span<const double> d) const {
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (d[i] == 0.0) continue;
      if (nu_[i] > 0.0 && b[i] <= 0.0) return kInf;
      s += perspective_dz(utility_, nu_[i], b[i]) * d[i];
    }
    return s;
  }

 private:
  const UtilitySpec& utility_;
  const PositiveMeasure& nu_;
  const PriorSet& priors_;
};

}  // namespace

RobustDivergence robust_v_divergence(const UtilitySpec& utility, const PositiveMeasure& nu,
                                     const PriorSet& priors, const FrankWolfeOptions& options) {
  if (nu.size() != priors.scenario_count()) throw std::invalid_argument("robust_v_divergence: dimension mismatch");
  const std::size_t K = priors.size();
  const std::size_t n = nu.size();

  // With V(0) = +inf every prior charging a nu-null scenario is useless,
  // so the search runs over the face spanned by the remaining vertices.
  std::vector<bool> allowed(K, true);
  if (utility.v_at_zero() == kInf) {
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (priors.vertex(k)[i] > 0.0 && nu[i] == 0.0) allowed[k] = false;
  }
  const auto allowed_count = static_cast<std::size_t>(std::count(allowed.begin(), allowed.end(), true));

  RobustDivergence out;
  out.weights.assign(K, 0.0);
  if (allowed_count == 0) {
    out.weights.assign(K, 1.0 / static_cast<double>(K));
    out.measure = priors.mixture(out.weights);
    return out;
  }
  for (std::size_t k = 0; k < K; ++k)
    if (allowed[k]) out.weights[k] = 1.0 / static_cast<double>(allowed_count);

  DivergenceOverHull f(utility, nu, priors);
  Vector b = f.base(out.weights);
  double value = f.value(b);
  out.measure = b;
  if (value == kInf) return out;  // maximal support already fails nu << P
  out.value = value;
  if (K == 1) {
    out.fw_gap = 0.0;
    return out;
  }

  Vector direction(n);
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector g = f.gradient(b, allowed);
    std::size_t s = K;
    std::size_t a = K;
    double inner = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (!allowed[k]) continue;
      if (s == K || g[k] < g[s]) s = k;
      if (out.weights[k] > 0.0) {
        inner += out.weights[k] * g[k];
        if (a == K || g[k] > g[a]) a = k;
      }
    }
    out.fw_gap = std::max(0.0, inner - g[s]);
    out.iterations = it;
    if (out.fw_gap <= options.gap_tolerance || s == a) break;

    // Pairwise step: move mass from the worst active vertex to the best one.
    const Vector& ps = priors.vertex(s);
    const Vector& pa = priors.vertex(a);
    for (std::size_t i = 0; i < n; ++i) direction[i] = ps[i] - pa[i];
    const double gamma_max = out.weights[a];

    auto moved = [&](double gamma) {
      Vector bb(n);
      for (std::size_t i = 0; i < n; ++i) bb[i] = std::max(0.0, b[i] + gamma * direction[i]);
      return bb;
    };

    double gamma = 0.0;
    const Vector b_end = moved(gamma_max);
    if (f.value(b_end) < kInf && f.slope(b_end, direction) <= 0.0) {
      gamma = gamma_max;
    } else {
      double lo = 0.0;
      double hi = gamma_max;
      for (int j = 0; j < 100 && hi - lo > 1e-17; ++j) {
        const double mid = 0.5 * (lo + hi);
        if (f.slope(moved(mid), direction) > 0.0)
          hi = mid;
        else
          lo = mid;
      }
      gamma = lo;
    }
    if (gamma <= 0.0) break;

    Vector trial_w = out.weights;
    trial_w[s] += gamma;
    trial_w[a] = (gamma == gamma_max) ? 0.0 : trial_w[a] - gamma;
    const Vector trial_b = f.base(trial_w);
    const double trial_value = f.value(trial_b);
    if (!(trial_value <= value)) break;
    out.weights = std::move(trial_w);
    b = trial_b;
    value = trial_value;
  }
  out.value = value;
  out.measure = b;
  return out;
}

double robust_integral(const UtilitySpec& utility, const PriorSet& priors, const Claim& claim,
                       std::span<const double> x) {
  if (x.size() != priors.scenario_count() || claim.size() != x.size())
    throw std::invalid_argument("robust_integral: dimension mismatch");
  Vector f(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) f[i] = -utility.u(-x[i] + claim[i]);
  double best = -kInf;
  for (const Vector& p : priors.vertices()) best = std::max(best, expectation(p, f));
  return best;
}

double dual_functional_j(const UtilitySpec& utility, const PriorSet& priors, std::span<const double> nu,
                         const Claim& claim) {
  if (nu.size() != claim.size()) throw std::invalid_argument("dual_functional_j: dimension mismatch");
  for (double m : nu)
    if (m < 0.0) return kInf;
  const PositiveMeasure measure(Vector(nu.begin(), nu.end()));
  const double div = robust_v_divergence(utility, measure, priors).value;
  if (div == kInf) return kInf;
  return div + expectation(nu, claim.payoff());
}

ConjugateCheckReport conjugate_identity_check(const UtilitySpec& utility, const PriorSet& priors,
                                              const Claim& claim, std::span<const double> nu,
                                              const ConjugateGridOptions& options) {
  const std::size_t n = nu.size();
  if (n > options.max_scenarios)
    throw std::invalid_argument("conjugate_identity_check: too many scenarios for a brute-force grid");
  if (priors.scenario_count() != n || claim.size() != n)
    throw std::invalid_argument("conjugate_identity_check: dimension mismatch");

  ConjugateCheckReport report;
  report.j_value = dual_functional_j(utility, priors, nu, claim);

  const double box = options.x_max;
  // Keep the coarse sweep around two million points.
  std::size_t coarse = options.coarse_points;
  while (coarse > 5 && std::pow(static_cast<double>(coarse), static_cast<double>(n)) > 2e6) coarse -= 2;
  const std::size_t window = n <= 4 ? options.window : 2;

  Vector center(n, 0.0);
  double spacing = 2.0 * box / static_cast<double>(coarse - 1);
  bool first = true;

  for (std::size_t level = 0; level <= options.refinements; ++level) {
    // Axis values of this level.
    std::vector<Vector> axis(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (first) {
        for (std::size_t j = 0; j < coarse; ++j) axis[i].push_back(-box + spacing * static_cast<double>(j));
      } else {
        for (long j = -static_cast<long>(window); j <= static_cast<long>(window); ++j) {
          const double v = center[i] + spacing * static_cast<double>(j);
          if (v >= -box - 1e-12 && v <= box + 1e-12) axis[i].push_back(std::clamp(v, -box, box));
        }
      }
    }
    // Integrand f(omega, x) = -U(-x + B) tabulated per axis.
    std::vector<Vector> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      f[i].resize(axis[i].size());
      for (std::size_t j = 0; j < axis[i].size(); ++j) f[i][j] = -utility.u(-axis[i][j] + claim[i]);
    }

    std::vector<std::size_t> idx(n, 0);
    double best = -kInf;
    std::vector<std::size_t> best_idx(n, 0);
    while (true) {
      double linear = 0.0;
      for (std::size_t i = 0; i < n; ++i) linear += axis[i][idx[i]] * nu[i];
      double integral = -kInf;
      for (const Vector& p : priors.vertices()) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          if (p[i] != 0.0) s += p[i] * f[i][idx[i]];
        integral = std::max(integral, s);
      }
      const double val = linear - integral;
      if (val > best) {
        best = val;
        best_idx = idx;
      }
      std::size_t d = 0;
      while (d < n && ++idx[d] == axis[d].size()) idx[d++] = 0;
      if (d == n) break;
    }
    for (std::size_t i = 0; i < n; ++i) center[i] = axis[i][best_idx[i]];
    report.grid_sup = std::max(report.grid_sup, best);
    first = false;
    spacing *= 0.5;
  }
  report.argmax = center;
  report.hit_boundary = std::any_of(center.begin(), center.end(),
                                    [box](double v) { return std::abs(std::abs(v) - box) < 1e-12; });
  return report;
}

double robust_ui_modulus(std::span<const double> x, const PriorSet& priors, double threshold) {
  if (x.size() != priors.scenario_count()) throw std::invalid_argument("robust_ui_modulus: dimension mismatch");
  if (!(threshold > 0.0)) throw std::invalid_argument("robust_ui_modulus: threshold must be positive");
  double best = 0.0;
  for (const Vector& p : priors.vertices()) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (std::abs(x[i]) >= threshold) s += p[i] * std::abs(x[i]);
    best = std::max(best, s);
  }
  return best;
}

double family_ui_modulus(const std::vector<Vector>& family, std::span<const double> measure, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("family_ui_modulus: threshold must be positive");
  double best = 0.0;
  for (const Vector& y : family) {
    if (y.size() != measure.size()) throw std::invalid_argument("family_ui_modulus: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (std::abs(y[i]) >= threshold) s += measure[i] * std::abs(y[i]);
    best = std::max(best, s);
  }
  return best;
}

}  // namespace rdual
