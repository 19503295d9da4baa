// Acceptance run: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "instance_suite.hpp"
#include "rdual/countable_examples.hpp"
#include "rdual/functionals.hpp"
#include "rdual/market_builders.hpp"
#include "rdual/pricing.hpp"
#include "rdual/report.hpp"
#include "rdual/solvers.hpp"

using namespace rdual;
using rdual::testing::Instance;
using rdual::testing::uniform01;

namespace {

constexpr std::uint64_t kSeed = 20240611;

int failures = 0;

void verdict(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("[%2d] %-40s %s  %s\n", id, title.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct SuiteRun {
  GapReport gap;
  double seconds;
};

std::vector<SuiteRun> run_suite(const std::vector<Instance>& suite) {
  std::vector<SuiteRun> out;
  for (const Instance& inst : suite) {
    const auto t0 = std::chrono::steady_clock::now();
    GapReport g = duality_gap(inst.model, inst.priors, inst.utility);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back({std::move(g), s});
  }
  return out;
}

void strong_duality(const std::vector<Instance>& suite, const std::vector<SuiteRun>& runs) {
  double worst_gap = 0.0;
  double slowest = 0.0;
  std::string worst_name;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const double gap = std::abs(runs[i].gap.dual - runs[i].gap.primal);
    if (!(gap <= worst_gap)) {
      worst_gap = gap;
      worst_name = suite[i].name;
    }
    slowest = std::max(slowest, runs[i].seconds);
  }
  verdict(1, "strong duality on generated suite", suite.size() >= 20 && worst_gap <= 1e-5 && slowest < 10.0,
          std::to_string(suite.size()) + " instances, max |gap| " + fmt("%.2e", worst_gap) + " (" + worst_name +
              "), slowest " + fmt("%.2f s", slowest));
}

void weak_duality(const std::vector<SuiteRun>& runs) {
  double worst = kInf;
  std::size_t pairs = 0;
  int violations = 0;
  for (const SuiteRun& r : runs) {
    for (double d : r.gap.dual_result.history)
      for (double p : r.gap.primal_result.history) {
        ++pairs;
        worst = std::min(worst, d - p);
        if (d - p < -1e-8) ++violations;
      }
  }
  verdict(2, "weak duality at every iterate pair", violations == 0,
          std::to_string(pairs) + " pairs, min dual - primal " + fmt("%.3e", worst));
}

void conjugate_identity(const std::vector<Instance>& suite) {
  std::mt19937_64 rng(kSeed + 3);
  int tested = 0;
  double worst_excess = -kInf;
  double worst_abs = 0.0;
  bool ok = true;
  for (const Instance& inst : suite) {
    const std::size_t n = inst.model.scenario_count();
    if (n > 4) continue;
    const Vector mid = inst.priors.average();
    for (int k = 0; k < 2; ++k) {
      Vector nu(n);
      const double mass = 0.5 + uniform01(rng);
      for (std::size_t w = 0; w < n; ++w) nu[w] = mass * mid[w] * (0.7 + 0.6 * uniform01(rng));
      const ConjugateCheckReport c = conjugate_identity_check(inst.utility, inst.priors, inst.model.claim, nu);
      if (c.hit_boundary || c.j_value == kInf) {
        ok = false;
        continue;
      }
      worst_excess = std::max(worst_excess, c.young_excess());
      worst_abs = std::max(worst_abs, std::abs(c.young_excess()));
      ok = ok && c.young_excess() <= 1e-8 && std::abs(c.young_excess()) <= 1e-3;
    }
    ++tested;
  }
  verdict(3, "robust conjugate identity (grid oracle)", ok && tested >= 10,
          std::to_string(tested) + " instances, max |grid - J| " + fmt("%.2e", worst_abs) + ", max excess " +
              fmt("%.2e", worst_excess));
}

double grid_conjugate(const UtilitySpec& u, double y) {
  // Concave maximisation in x: coarse scan, then zoom.
  double lo = -40.0, hi = 1.0e9;
  double best_x = 0.0;
  for (int round = 0; round < 60; ++round) {
    double best = -kInf;
    const int points = 400;
    for (int i = 0; i <= points; ++i) {
      const double x = lo + (hi - lo) * i / points;
      const double v = u.u(x) - x * y;
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    const double h = (hi - lo) / points;
    lo = best_x - 2 * h;
    hi = best_x + 2 * h;
  }
  return u.u(best_x) - best_x * y;
}

void conjugate_correctness() {
  const UtilitySpec exp_numeric = exponential_utility().numeric();
  const UtilitySpec glued = glued_utility();
  const UtilitySpec glued_numeric = glued.numeric();
  double exp_err = 0.0, glued_err = 0.0, grid_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double y = std::pow(10.0, -4.0 + 7.0 * i / 99.0);
    exp_err = std::max(exp_err, std::abs(exp_numeric.v(y) - (y * std::log(y) - y)));
    glued_err = std::max(glued_err, std::abs(glued_numeric.v(y) - glued.v(y)));
    if (i % 9 == 0) grid_err = std::max(grid_err, std::abs(grid_conjugate(glued, y) - glued.v(y)));
  }
  verdict(4, "conjugate correctness (EXP and GLUED)", exp_err <= 1e-8 && glued_err <= 1e-8 && grid_err <= 1e-8,
          "EXP " + fmt("%.1e", exp_err) + ", GLUED " + fmt("%.1e", glued_err) + ", grid oracle " +
              fmt("%.1e", grid_err));
}

void perspective_suite() {
  bool cases = true;
  for (const UtilitySpec& u : {exponential_utility(), glued_utility()}) {
    cases = cases && perspective(u, 0.0, 0.0) == 0.0;
    for (double y : {-2.0, -1e-9, 1e-9, 0.5, 3.0}) cases = cases && perspective(u, y, 0.0) == kInf;
  }
  std::mt19937_64 rng(kSeed + 5);
  double worst_h = 0.0, worst_c = -kInf;
  for (const UtilitySpec& u : {exponential_utility(), glued_utility()}) {
    for (int k = 0; k < 1000; ++k) {
      const double y1 = 5.0 * uniform01(rng) + 1e-3, z1 = 5.0 * uniform01(rng) + 1e-3;
      const double y2 = 5.0 * uniform01(rng) + 1e-3, z2 = 5.0 * uniform01(rng) + 1e-3;
      const double t = 10.0 * uniform01(rng) + 1e-3, a = uniform01(rng);
      const double base = perspective(u, y1, z1);
      worst_h = std::max(worst_h, std::abs(perspective(u, t * y1, t * z1) - t * base) / std::max(1.0, std::abs(t * base)));
      const double mid = perspective(u, a * y1 + (1 - a) * y2, a * z1 + (1 - a) * z2);
      worst_c = std::max(worst_c, mid - (a * base + (1 - a) * perspective(u, y2, z2)));
    }
  }
  verdict(5, "perspective cases, homogeneity, convexity", cases && worst_h <= 1e-12 && worst_c <= 1e-12,
          "rel homogeneity err " + fmt("%.1e", worst_h) + ", max convexity excess " + fmt("%.1e", worst_c));
}

void variational_bound(const std::vector<Instance>& suite, const std::vector<SuiteRun>& runs) {
  int checked = 0, violations = 0;
  double largest = -kInf;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    if (!suite[i].exponential || !runs[i].gap.dual_result.converged) continue;
    ++checked;
    largest = std::max(largest, runs[i].gap.dual);
    if (!(runs[i].gap.dual < -1e-9)) ++violations;
  }
  verdict(6, "variational bound for EXP", checked > 0 && violations == 0,
          std::to_string(checked) + " converged duals, largest " + fmt("%.4g", largest));
}

void pricing() {
  const ScenarioModel bin(uniform_space(2), complete_binomial(), Claim({1.0, 0.0}));
  const PriorSet fair({{0.5, 0.5}});
  const UtilitySpec u = exponential_utility();
  const PriceReport p = indifference_price(bin, fair, u);
  bool ok = std::abs(p.p_b - 1.0 / 3.0) <= 1e-4 && std::abs(p.oracle_price - 1.0 / 3.0) <= 1e-4;

  const ScenarioModel tri(ScenarioSpace({0.3, 0.4, 0.3}), multiplicative_tree(1.0, {1.3, 1.0, 0.8}, 1),
                          Claim::zero(3));
  const PriorSet priors({{0.2, 0.5, 0.3}, {0.45, 0.25, 0.3}});
  const double v0 = claimless_value(tri, priors, u);
  std::mt19937_64 rng(kSeed + 7);
  double trans = 0.0, mono = kInf;
  for (int k = 0; k < 10; ++k) {
    Vector b(3), bump(3);
    for (double& x : b) x = -3.0 + 6.0 * uniform01(rng);
    for (double& x : bump) x = uniform01(rng);
    const double c = -1.0 + 2.0 * uniform01(rng);
    const double base = buyer_price(tri.with_claim(Claim(b)), priors, u, v0);
    const double shifted = buyer_price(tri.with_claim(Claim(b).shifted(c)), priors, u, v0);
    Vector up = b;
    for (std::size_t i = 0; i < 3; ++i) up[i] += bump[i];
    const double higher = buyer_price(tri.with_claim(Claim(up)), priors, u, v0);
    trans = std::max(trans, std::abs(shifted - base - c));
    mono = std::min(mono, higher - base);
  }
  ok = ok && trans <= 1e-6 && mono >= -1e-9;
  verdict(7, "indifference pricing", ok,
          "formula " + fmt("%.8f", p.p_b) + ", oracle " + fmt("%.8f", p.oracle_price) + ", translation err " +
              fmt("%.1e", trans) + ", min monotone step " + fmt("%.2e", mono));
}

void epsilon_mixing(const std::vector<Instance>& suite, const std::vector<SuiteRun>& runs) {
  double worst = 0.0;
  std::string where;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto rows =
        epsilon_mixing_table(suite[i].model, suite[i].priors, suite[i].utility, {1e-2, 1e-4, 1e-6}, runs[i].gap.dual);
    for (const MixingRow& r : rows)
      if (!(std::abs(r.shift) <= worst)) {
        worst = std::abs(r.shift);
        where = suite[i].name + " eps " + fmt("%g", r.epsilon);
      }
  }
  verdict(8, "epsilon-mixing stability", worst <= 5e-6,
          "max |shift| " + fmt("%.2e", worst) + (where.empty() ? "" : " (" + where + ")"));
}

void countable_example() {
  constexpr int n_max = 12;
  bool ok = true;
  for (int n = 1; n <= n_max; ++n) ok = ok && example1_expected_w_exact(n_max, n) == Fraction{2 * n - 1, n};
  for (int N = 2; N <= n_max; ++N) ok = ok && example1_tail_modulus_exact(n_max, N) == Fraction{1, 1};
  double prev = kInf;
  std::string table;
  for (int N = 2; N <= n_max; ++N) {
    const Fraction f = example1_priors_ui_modulus_exact(n_max, N);
    ok = ok && f.to_double() <= prev && f == example1_priors_ui_formula(n_max, N, true);
    prev = f.to_double();
    table += (N > 2 ? " " : "") + std::to_string(f.num) + "/" + std::to_string(f.den);
  }
  verdict(9, "countable example identities (exact)", ok, "prior ui-modulus N=2..12: " + table);
}

std::string fingerprint(const Instance& inst) {
  const GapReport g = duality_gap(inst.model, inst.priors, inst.utility);
  nlohmann::json j = to_json(g);
  j["mixing"] = to_json(epsilon_mixing_table(inst.model, inst.priors, inst.utility, {1e-2}, g.dual));
  return j.dump();
}

void determinism(const std::vector<Instance>& suite, const std::vector<SuiteRun>& runs) {
  const std::vector<Instance> again = rdual::testing::generate_suite(kSeed);
  int mismatches = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    if (to_json(runs[i].gap).dump() != to_json(duality_gap(again[i].model, again[i].priors, again[i].utility)).dump())
      ++mismatches;
    else if (fingerprint(suite[i]) != fingerprint(again[i]))
      ++mismatches;
  }
  verdict(10, "determinism of reports", mismatches == 0,
          std::to_string(suite.size()) + " instances rerun, " + std::to_string(mismatches) + " mismatches");
}

}  // namespace

int main() {
  const std::vector<Instance> suite = rdual::testing::generate_suite(kSeed);
  const std::vector<SuiteRun> runs = run_suite(suite);
  strong_duality(suite, runs);
  weak_duality(runs);
  conjugate_identity(suite);
  conjugate_correctness();
  perspective_suite();
  variational_bound(suite, runs);
  pricing();
  epsilon_mixing(suite, runs);
  countable_example();
  determinism(suite, runs);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
