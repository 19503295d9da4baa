#pragma once

#include <cmath>
#include <functional>
#include <utility>

namespace rdual::detail {

/// Golden-section search for a unimodal f on [lo, hi]. Returns (argmin, min).
inline std::pair<double, double> golden_section(const std::function<double(double)>& f, double lo, double hi,
                                                double tol, int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && b - a > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

/// Minimises a unimodal function of u = log(s) over s > 0. The bracket
/// [log lo, log hi] is widened by factors of 100 while the minimiser
/// sits on an end. Returns (argmin s, min).
inline std::pair<double, double> minimize_over_positive(const std::function<double(double)>& f, double lo,
                                                        double hi, double log_tol = 1e-10) {
  auto g = [&f](double u) { return f(std::exp(u)); };
  double a = std::log(lo);
  double b = std::log(hi);
  for (int widen = 0; widen < 12; ++widen) {
    auto [u, val] = golden_section(g, a, b, log_tol);
    const double span = b - a;
    if (u - a < 1e-3 * span && a > -700.0) {
      a -= std::log(100.0);
      continue;
    }
    if (b - u < 1e-3 * span && b < 700.0) {
      b += std::log(100.0);
      continue;
    }
    return {std::exp(u), val};
  }
  auto [u, val] = golden_section(g, a, b, log_tol);
  return {std::exp(u), val};
}

}  // namespace rdual::detail
