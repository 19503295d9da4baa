#include "rdual/perspective_program.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace rdual {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_matrix(const std::vector<Vector>& rows, std::size_t cols) {
  MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("perspective program: row dimension mismatch");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

VectorXd to_vector(const Vector& v) { return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

class Problem {
 public:
  Problem(const UtilitySpec& utility, const PerspectiveProgram& p)
      : utility_(utility),
        m_(p.variable_count),
        L_(to_matrix(p.measure_map, m_)),
        M_(to_matrix(p.base_map, m_)),
        c_(to_vector(p.linear)) {
    if (p.measure_map.size() != p.base_map.size())
      throw std::invalid_argument("perspective program: measure and base maps differ in height");
    if (static_cast<std::size_t>(c_.size()) != m_) throw std::invalid_argument("perspective program: cost size");
    const MatrixXd E = to_matrix(p.equality, m_);
    if (E.rows() == 0) {
      N_ = MatrixXd::Identity(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    } else {
      Eigen::JacobiSVD<MatrixXd> svd(E, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const double cut = 1e-12 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
      Eigen::Index rank = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
      N_ = svd.matrixV().rightCols(static_cast<Eigen::Index>(m_) - rank);
    }
    E_ = E;
    e_ = to_vector(p.rhs);
  }

  double objective(const VectorXd& x) const {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!(x(i) > 0.0)) return kInf;
    const VectorXd a = L_ * x;
    const VectorXd b = M_ * x;
    double s = c_.dot(x);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double term = perspective(utility_, std::max(a(i), 0.0), std::max(b(i), 0.0));
      if (!std::isfinite(term)) return kInf;
      s += term;
    }
    return s;
  }

  double barrier(const VectorXd& x, double mu) const {
    const double f = objective(x);
    if (f == kInf) return kInf;
    return f - mu * x.array().log().sum();
  }

  // Gradient and Hessian of the barrier objective in x.
  void derivatives(const VectorXd& x, double mu, VectorXd& g, MatrixXd& H) const {
    const VectorXd a = L_ * x;
    const VectorXd b = M_ * x;
    const Eigen::Index n = a.size();
    VectorXd da(n), db(n), haa(n), hab(n), hbb(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a(i) <= 0.0 && b(i) <= 0.0) {
        da(i) = db(i) = haa(i) = hab(i) = hbb(i) = 0.0;
        continue;
      }
      const PerspectiveDerivatives d = perspective_derivatives(utility_, a(i), b(i));
      da(i) = d.dy;
      db(i) = d.dz;
      haa(i) = d.hyy;
      hab(i) = d.hyz;
      hbb(i) = d.hzz;
    }
    g = L_.transpose() * da + M_.transpose() * db + c_;
    g.array() -= mu / x.array();
    const MatrixXd cross = L_.transpose() * hab.asDiagonal() * M_;
    H = L_.transpose() * haa.asDiagonal() * L_ + cross + cross.transpose() + M_.transpose() * hbb.asDiagonal() * M_;
    H.diagonal().array() += mu / x.array().square();
  }

  double residual(const VectorXd& x) const {
    if (E_.rows() == 0) return 0.0;
    return (E_ * x - e_).cwiseAbs().maxCoeff();
  }

  const MatrixXd& null_space() const { return N_; }
  std::size_t size() const { return m_; }

 private:
  const UtilitySpec& utility_;
  std::size_t m_;
  MatrixXd L_, M_, E_, N_;
  VectorXd c_, e_;
};

}  // namespace

double evaluate(const UtilitySpec& utility, const PerspectiveProgram& program, const Vector& x) {
  Problem p(utility, program);
  return p.objective(to_vector(x));
}

BarrierResult minimize_perspective_program(const UtilitySpec& utility, const PerspectiveProgram& program,
                                           Vector start, const BarrierOptions& options) {
  const Problem problem(utility, program);
  if (start.size() != problem.size()) throw std::invalid_argument("barrier: start has wrong dimension");
  VectorXd x = to_vector(start);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x(i) > 0.0)) throw std::invalid_argument("barrier: start must be strictly positive");
  if (problem.residual(x) > 1e-9) throw std::invalid_argument("barrier: start violates the equality constraints");

  BarrierResult out;
  const double f0 = problem.objective(x);
  if (f0 == kInf) throw std::invalid_argument("barrier: objective is infinite at the start point");
  out.history.push_back(f0);

  const MatrixXd& N = problem.null_space();
  const double inequality_count = static_cast<double>(problem.size());
  double mu = options.initial_mu;
  VectorXd g;
  MatrixXd H;

  while (true) {
    for (int step = 0; step < options.max_steps_per_centering; ++step) {
      if (out.newton_steps >= options.max_newton_steps) break;
      if (N.cols() == 0) break;
      problem.derivatives(x, mu, g, H);
      const VectorXd gr = N.transpose() * g;
      const MatrixXd Hr = N.transpose() * H * N;
      Eigen::LDLT<MatrixXd> ldlt(Hr);
      VectorXd dir = ldlt.solve(-gr);
      if (ldlt.info() != Eigen::Success || !dir.allFinite() || dir.dot(gr) >= 0.0) dir = -gr;
      const double decrement = -dir.dot(gr);
      if (decrement <= 1e-14 * std::max(1.0, std::abs(out.history.back()))) break;

      const VectorXd dx = N * dir;
      double alpha = 1.0;
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (dx(i) < 0.0) alpha = std::min(alpha, -0.99 * x(i) / dx(i));

      const double phi = problem.barrier(x, mu);
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        const VectorXd trial = x + alpha * dx;
        const double phi_trial = problem.barrier(trial, mu);
        if (phi_trial <= phi - 1e-4 * alpha * decrement) {
          x = trial;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      ++out.newton_steps;
      out.history.push_back(problem.objective(x));
    }
    out.gap_bound = inequality_count * mu;
    if (out.gap_bound <= options.gap_target) {
      out.converged = true;
      break;
    }
    if (out.newton_steps >= options.max_newton_steps) break;
    mu *= options.mu_factor;
  }

  out.x.assign(x.data(), x.data() + x.size());
  out.value = problem.objective(x);
  return out;
}

}  // namespace rdual
