#include "rdual/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "line_search.hpp"
#include "rdual/martingale.hpp"
#include "rdual/perspective_program.hpp"

namespace rdual {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kCenteringTol = 1e-12;

// Worst-case utility in gain coordinates: x = basis z + B.
class PrimalProblem {
 public:
  PrimalProblem(const UtilitySpec& utility, MatrixXd basis, const PriorSet& priors, const Vector& claim)
      : utility_(utility), basis_(std::move(basis)), priors_(priors) {
    b_ = Eigen::Map<const VectorXd>(claim.data(), static_cast<Eigen::Index>(claim.size()));
  }

  Eigen::Index dim() const { return basis_.cols(); }
  std::size_t vertex_count() const { return priors_.size(); }

  VectorXd wealth(const VectorXd& z) const { return basis_ * z + b_; }

  // Expected utility under each vertex; empty optional when some charged
  // scenario has U = -inf or overflow.
  std::optional<VectorXd> values(const VectorXd& z) const {
    const VectorXd x = wealth(z);
    VectorXd u(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) u(i) = utility_.u(x(i));
    VectorXd f(static_cast<Eigen::Index>(priors_.size()));
    for (std::size_t k = 0; k < priors_.size(); ++k) {
      double s = 0.0;
      const Vector& p = priors_.vertex(k);
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != 0.0) s += p[i] * u(static_cast<Eigen::Index>(i));
      if (!std::isfinite(s)) return std::nullopt;
      f(static_cast<Eigen::Index>(k)) = s;
    }
    return f;
  }

  // Barrier objective -t - mu sum log(f_k - t) in the variables (z, t).
  double barrier(const VectorXd& v, double mu) const {
    const Eigen::Index d = dim();
    const auto f = values(v.head(d));
    if (!f) return kInf;
    const double t = v(d);
    double s = -t;
    for (Eigen::Index k = 0; k < f->size(); ++k) {
      const double slack = (*f)(k) - t;
      if (!(slack > 0.0)) return kInf;
      s -= mu * std::log(slack);
    }
    return s;
  }

  void derivatives(const VectorXd& v, double mu, VectorXd& g, MatrixXd& H) const {
    const Eigen::Index d = dim();
    const VectorXd x = wealth(v.head(d));
    const VectorXd f = *values(v.head(d));
    const double t = v(d);
    VectorXd up(x.size()), upp(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      up(i) = utility_.u_prime(x(i));
      upp(i) = utility_.u_second(x(i));
    }
    g = VectorXd::Zero(d + 1);
    H = MatrixXd::Zero(d + 1, d + 1);
    g(d) = -1.0;
    for (std::size_t k = 0; k < priors_.size(); ++k) {
      const Eigen::Index kk = static_cast<Eigen::Index>(k);
      const Vector& p = priors_.vertex(k);
      const VectorXd pk = Eigen::Map<const VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
      const double slack = f(kk) - t;
      VectorXd a(d + 1);
      a.head(d) = basis_.transpose() * pk.cwiseProduct(up);
      a(d) = -1.0;
      g -= (mu / slack) * a;
      H += (mu / (slack * slack)) * a * a.transpose();
      H.topLeftCorner(d, d) -= (mu / slack) * basis_.transpose() * pk.cwiseProduct(upp).asDiagonal() * basis_;
    }
  }

 private:
  const UtilitySpec& utility_;
  MatrixXd basis_;
  const PriorSet& priors_;
  VectorXd b_;
};

MatrixXd gain_matrix(const MartingaleConstraints& c) {
  MatrixXd g(static_cast<Eigen::Index>(c.scenario_count), static_cast<Eigen::Index>(c.rows.size()));
  for (std::size_t r = 0; r < c.rows.size(); ++r)
    for (std::size_t i = 0; i < c.scenario_count; ++i)
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = c.rows[r][i];
  return g;
}

Vector equivalent_measure(const MartingaleConstraints& constraints) {
  auto q = find_equivalent_mm(constraints);
  if (!q) throw ValidationError("A3", "assumption A3 violated: no equivalent martingale measure (arbitrage)");
  return *q;
}

struct DualSetup {
  PerspectiveProgram program;
  Vector start;
  MatrixXd transform;  // nu = transform * nu'
};

// Variables (nu', w); nu = T nu'. Optional fixed total mass of nu.
DualSetup build_dual(const ScenarioModel& model, const PriorSet& priors, const MartingaleConstraints& constraints,
                     const Vector& q_e, double epsilon, std::optional<double> mass) {
  const std::size_t n = model.scenario_count();
  const std::size_t k = priors.size();
  DualSetup s;
  const VectorXd qe = Eigen::Map<const VectorXd>(q_e.data(), static_cast<Eigen::Index>(n));
  s.transform = MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (epsilon > 0.0) s.transform += (epsilon / (1.0 - epsilon)) * qe * VectorXd::Ones(static_cast<Eigen::Index>(n)).transpose();

  PerspectiveProgram& p = s.program;
  p.variable_count = n + k;
  for (std::size_t i = 0; i < n; ++i) {
    Vector l(n + k, 0.0);
    for (std::size_t j = 0; j < n; ++j) l[j] = s.transform(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    p.measure_map.push_back(std::move(l));
    Vector m(n + k, 0.0);
    for (std::size_t v = 0; v < k; ++v) m[n + v] = priors.vertex(v)[i];
    p.base_map.push_back(std::move(m));
  }
  p.linear.assign(n + k, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += model.claim[i] * s.transform(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    p.linear[j] = c;
  }
  // A T = A since A q_e = 0; the transform leaves the cone rows unchanged.
  for (const Vector& row : constraints.rows) {
    Vector e(n + k, 0.0);
    std::copy(row.begin(), row.end(), e.begin());
    p.equality.push_back(std::move(e));
    p.rhs.push_back(0.0);
  }
  Vector simplex(n + k, 0.0);
  std::fill(simplex.begin() + static_cast<std::ptrdiff_t>(n), simplex.end(), 1.0);
  p.equality.push_back(std::move(simplex));
  p.rhs.push_back(1.0);

  const double lambda0 = mass.value_or(1.0);
  if (mass) {
    Vector total(n + k, 0.0);
    for (std::size_t j = 0; j < n; ++j) total[j] = s.transform.col(static_cast<Eigen::Index>(j)).sum();
    p.equality.push_back(std::move(total));
    p.rhs.push_back(*mass);
  }

  s.start.assign(n + k, 1.0 / static_cast<double>(k));
  for (std::size_t j = 0; j < n; ++j) s.start[j] = (1.0 - epsilon) * lambda0 * q_e[j];
  return s;
}

DualResult run_dual(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                    double epsilon, std::optional<double> mass, const SolverOptions& options) {
  check_compatible(model, priors);
  const MartingaleConstraints constraints = build_constraints(model.market);
  const Vector q_e = equivalent_measure(constraints);
  const DualSetup setup = build_dual(model, priors, constraints, q_e, epsilon, mass);

  BarrierOptions bo;
  bo.gap_target = options.barrier_gap;
  bo.max_newton_steps = options.max_outer;
  const BarrierResult r = minimize_perspective_program(utility, setup.program, setup.start, bo);

  const std::size_t n = model.scenario_count();
  DualResult out;
  const VectorXd nu_prime = Eigen::Map<const VectorXd>(r.x.data(), static_cast<Eigen::Index>(n));
  const VectorXd nu = setup.transform * nu_prime;
  out.lambda_hat = nu.sum();
  out.q_hat.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.q_hat[i] = nu(static_cast<Eigen::Index>(i)) / out.lambda_hat;
    if (out.q_hat[i] > 1e-9) out.q_support.push_back(i);
  }
  out.p_weights.assign(r.x.begin() + static_cast<std::ptrdiff_t>(n), r.x.end());
  double wsum = 0.0;
  for (double w : out.p_weights) wsum += w;
  for (double& w : out.p_weights) w /= wsum;
  out.p_hat = priors.mixture(out.p_weights);
  out.value = r.value;
  out.iterations = r.newton_steps;
  out.history = r.history;
  out.converged = r.converged;
  out.gap_bound = r.gap_bound;
  return out;
}

}  // namespace

PrimalResult solve_primal(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                          const SolverOptions& options) {
  check_compatible(model, priors);
  const MartingaleConstraints constraints = build_constraints(model.market);
  equivalent_measure(constraints);

  const MatrixXd g = gain_matrix(constraints);
  Eigen::Index rank = 0;
  MatrixXd basis(g.rows(), 0);
  MatrixXd back;  // z -> flat theta
  if (g.cols() > 0) {
    Eigen::JacobiSVD<MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    const double cut = 1e-12 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut) ++rank;
    basis = svd.matrixU().leftCols(rank);
    back = svd.matrixV().leftCols(rank) * sv.head(rank).cwiseInverse().asDiagonal();
  }

  const PrimalProblem problem(utility, basis, priors, model.claim.payoff());
  const Eigen::Index d = problem.dim();
  const double kcount = static_cast<double>(problem.vertex_count());

  VectorXd v = VectorXd::Zero(d + 1);
  const auto f0 = problem.values(v.head(d));
  if (!f0) throw std::domain_error("solve_primal: utility is not finite at the zero strategy");
  const double fmin0 = f0->minCoeff();
  v(d) = fmin0 - std::max(1.0, std::abs(fmin0));

  PrimalResult out;
  out.history.push_back(fmin0);
  double mu = 1.0;
  VectorXd grad;
  MatrixXd hess;
  while (true) {
    for (int step = 0; step < 100 && out.iterations < options.max_iter; ++step) {
      problem.derivatives(v, mu, grad, hess);
      Eigen::LDLT<MatrixXd> ldlt(hess);
      VectorXd dir = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !dir.allFinite() || dir.dot(grad) >= 0.0) dir = -grad;
      const double decrement = -dir.dot(grad);
      if (decrement / 2.0 <= kCenteringTol) break;
      const double phi = problem.barrier(v, mu);
      double alpha = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < 80; ++bt) {
        const VectorXd trial = v + alpha * dir;
        if (problem.barrier(trial, mu) <= phi - 1e-4 * alpha * decrement) {
          v = trial;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      ++out.iterations;
      out.history.push_back(problem.values(v.head(d))->minCoeff());
    }
    out.gap_bound = kcount * mu;
    if (out.gap_bound <= options.barrier_gap) {
      out.converged = true;
      break;
    }
    if (out.iterations >= options.max_iter) break;
    mu *= 0.1;
  }

  const VectorXd f = *problem.values(v.head(d));
  out.prior_weights.resize(problem.vertex_count());
  double total = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    out.prior_weights[static_cast<std::size_t>(k)] = mu / (f(k) - v(d));
    total += out.prior_weights[static_cast<std::size_t>(k)];
  }
  for (std::size_t k = 0; k < out.prior_weights.size(); ++k) {
    out.prior_weights[k] /= total;
    if (out.prior_weights[k] >= 1e-6) out.active_vertices.push_back(k);
  }

  Vector flat(constraints.rows.size(), 0.0);
  if (rank > 0) {
    const VectorXd theta = back * v.head(d);
    flat.assign(theta.data(), theta.data() + theta.size());
  }
  out.theta_hat = Strategy::from_flat(model.market, flat);
  out.value = worst_case_expected_utility(model, priors, utility, out.theta_hat);
  out.history.push_back(out.value);
  return out;
}

DualResult solve_dual(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                      const SolverOptions& options) {
  return run_dual(model, priors, utility, 0.0, std::nullopt, options);
}

DualResult solve_dual_restricted(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                                 double epsilon, const SolverOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("restricted dual: epsilon must lie in (0, 1)");
  return run_dual(model, priors, utility, epsilon, std::nullopt, options);
}

double dual_value_at_mass(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                          double lambda, const SolverOptions& options) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dual_value_at_mass: lambda must be positive");
  return run_dual(model, priors, utility, 0.0, lambda, options).value;
}

double initial_capital_value(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                             double x, const SolverOptions& options) {
  auto f = [&](double lambda) { return lambda * x + dual_value_at_mass(model, priors, utility, lambda, options); };
  return detail::minimize_over_positive(f, 1e-2, 1e2, 1e-7).second;
}

GapReport duality_gap(const ScenarioModel& model, const PriorSet& priors, const UtilitySpec& utility,
                      const SolverOptions& options) {
  GapReport r;
  r.primal_result = solve_primal(model, priors, utility, options);
  r.dual_result = solve_dual(model, priors, utility, options);
  r.primal = r.primal_result.value;
  r.dual = r.dual_result.value;
  r.gap = r.dual - r.primal;
  const double best_primal = *std::max_element(r.primal_result.history.begin(), r.primal_result.history.end());
  const double best_dual = *std::min_element(r.dual_result.history.begin(), r.dual_result.history.end());
  r.worst_pair = best_dual - best_primal;
  r.weak_duality_ok = r.worst_pair >= -1e-8;
  r.success = r.weak_duality_ok && std::abs(r.gap) <= options.tol;
  return r;
}

bool check_variational_bound(const DualResult& dual, const UtilitySpec& utility) {
  if (utility.v_at_zero() == kInf) return true;
  return dual.value < utility.v_at_zero();
}

std::vector<MixingRow> epsilon_mixing_table(const ScenarioModel& model, const PriorSet& priors,
                                            const UtilitySpec& utility, const std::vector<double>& epsilons,
                                            double unrestricted_value, const SolverOptions& options) {
  std::vector<MixingRow> rows;
  for (double eps : epsilons) {
    const double v = solve_dual_restricted(model, priors, utility, eps, options).value;
    rows.push_back({eps, v, v - unrestricted_value});
  }
  return rows;
}

}  // namespace rdual
