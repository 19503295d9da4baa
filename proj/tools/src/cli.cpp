#include "rdual_cli/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "rdual/countable_examples.hpp"
#include "rdual/functionals.hpp"
#include "rdual/pricing.hpp"
#include "rdual/report.hpp"
#include "rdual/scenario_io.hpp"
#include "rdual/solvers.hpp"

namespace rdual::cli {

namespace {

using nlohmann::json;

struct CommonArgs {
  std::string scenario;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  std::string epsilon_list = "1e-2,1e-4,1e-6";
  std::string report_path;
  bool json_stdout = false;
};

struct Resolved {
  SolverOptions solver;
  std::uint64_t seed = 0;
  std::vector<double> epsilons;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("cli", "bad epsilon list entry '" + item + "'");
    }
    if (!(v > 0.0 && v < 1.0)) throw ValidationError("cli", "epsilon values must lie in (0, 1)");
    out.push_back(v);
  }
  return out;
}

Resolved resolve(const CommonArgs& a, const SolverConfig& file) {
  Resolved r;
  r.solver.tol = a.tol.value_or(file.tol);
  r.solver.max_iter = a.max_iter.value_or(file.max_iter);
  r.seed = a.seed.value_or(file.seed);
  r.epsilons = parse_list(a.epsilon_list);
  if (!(r.solver.tol > 0.0)) throw ValidationError("cli", "--tol must be positive");
  if (r.solver.max_iter < 1) throw ValidationError("cli", "--max-iter must be positive");
  return r;
}

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_scenario) {
  auto* s = cmd->add_option("--scenario", a.scenario, "Scenario file");
  if (needs_scenario) s->required()->check(CLI::ExistingFile);
  cmd->add_option("--tol", a.tol, "Duality gap tolerance")->envname("RDUAL_TOL");
  cmd->add_option("--max-iter", a.max_iter, "Primal iteration cap")->envname("RDUAL_MAX_ITER");
  cmd->add_option("--seed", a.seed, "Seed for randomised checks")->envname("RDUAL_SEED");
  cmd->add_option("--epsilon-mixing-list", a.epsilon_list, "Comma separated mixing weights")
      ->envname("RDUAL_EPSILON_MIXING_LIST");
  cmd->add_option("--report", a.report_path, "Write the JSON report here");
  cmd->add_flag("--json", a.json_stdout, "Print the JSON report instead of the summary");
}

void emit(const json& report, const CommonArgs& a, const std::string& summary, std::ostream& out) {
  if (!a.report_path.empty()) {
    std::ofstream f(a.report_path);
    if (!f) throw std::runtime_error("cannot write report to " + a.report_path);
    f << report.dump(2) << '\n';
  }
  if (a.json_stdout)
    out << report.dump(2) << '\n';
  else
    out << summary;
}

json resolved_echo(const Resolved& r) {
  return {{"tol", report_number(r.solver.tol)},
          {"max_iter", r.solver.max_iter},
          {"seed", r.seed},
          {"epsilons", report_vector(r.epsilons)}};
}

// Uniform double in [0, 1) from the top 53 bits.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int cmd_solve(const CommonArgs& a, std::ostream& out) {
  const ScenarioBundle b = parse_scenario(a.scenario);
  const Resolved r = resolve(a, b.solver);
  const GapReport g = duality_gap(b.model, b.priors, b.utility, r.solver);
  const auto mixing = epsilon_mixing_table(b.model, b.priors, b.utility, r.epsilons, g.dual, r.solver);
  const bool variational = check_variational_bound(g.dual_result, b.utility);

  json body = to_json(g);
  body["epsilon_mixing"] = to_json(mixing);
  body["variational_bound_ok"] = variational;
  body["config"] = config_echo(b);
  body["resolved"] = resolved_echo(r);
  const json report = make_report("solve", std::move(body));

  std::string s;
  s += fmt::format("primal value  {:.12g}\n", g.primal);
  s += fmt::format("dual value    {:.12g}\n", g.dual);
  s += fmt::format("gap           {:.3e}  (tol {:.1e})\n", g.gap, r.solver.tol);
  s += fmt::format("lambda        {:.12g}\n", g.dual_result.lambda_hat);
  s += "Q             [";
  for (std::size_t i = 0; i < g.dual_result.q_hat.size(); ++i)
    s += fmt::format("{}{:.8g}", i ? ", " : "", g.dual_result.q_hat[i]);
  s += "]\n";
  for (const MixingRow& m : mixing) s += fmt::format("eps {:<8g}    shift {:.3e}\n", m.epsilon, m.shift);
  s += fmt::format("weak duality  {}\n", g.weak_duality_ok ? "ok" : "VIOLATED");
  emit(report, a, s, out);
  return g.success ? kOk : kTolerance;
}

int cmd_price(const CommonArgs& a, const std::string& claim, bool oracle, std::ostream& out) {
  ScenarioBundle b = parse_scenario(a.scenario);
  if (!claim.empty()) {
    try {
      b = b.with_named_claim(claim);
    } catch (const std::out_of_range& e) {
      throw ValidationError("cli", e.what());
    }
  }
  const Resolved r = resolve(a, b.solver);
  const PriceReport p = indifference_price(b.model, b.priors, b.utility, oracle, r.solver);
  const bool ordered = p.p_b <= p.p_s + 1e-6;
  const bool agree = !oracle || p.method_agreement <= 1e-4;

  json body = to_json(p);
  body["claim"] = claim.empty() ? "payoff" : claim;
  body["buyer_below_seller"] = ordered;
  body["config"] = config_echo(b);
  body["resolved"] = resolved_echo(r);
  const json report = make_report("price", std::move(body));

  std::string s;
  s += fmt::format("buyer price   {:.10g}\n", p.p_b);
  s += fmt::format("seller price  {:.10g}\n", p.p_s);
  if (oracle) s += fmt::format("oracle price  {:.10g}  (|diff| {:.2e})\n", p.oracle_price, p.method_agreement);
  s += fmt::format("gamma(Q)      {:.6g}\n", p.gamma_at_qhat);
  s += fmt::format("v0            {:.12g}\n", p.v0);
  emit(report, a, s, out);
  return ordered && agree ? kOk : kTolerance;
}

int cmd_verify(const CommonArgs& a, std::ostream& out) {
  const ScenarioBundle b = parse_scenario(a.scenario);
  const Resolved r = resolve(a, b.solver);
  std::mt19937_64 rng(r.seed);
  json checks = json::array();
  std::string s;
  bool all = true;
  auto record = [&](const std::string& name, bool ok, json detail) {
    all = all && ok;
    detail["name"] = name;
    detail["pass"] = ok;
    checks.push_back(std::move(detail));
    s += fmt::format("{:<22}{}\n", name, ok ? "PASS" : "FAIL");
  };

  {
    double worst = 0.0;
    double tangent = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double x = -5.0 + 10.0 * uniform(rng);
      const double y = std::exp(-5.0 + 10.0 * uniform(rng));
      worst = std::min(worst, young_gap(b.utility, x, y));
      tangent = std::max(tangent, std::abs(young_gap(b.utility, x, b.utility.u_prime(x))));
    }
    record("young_inequality", worst >= -1e-9 && tangent <= 1e-7,
           {{"min_gap", report_number(worst)}, {"max_tangent_gap", report_number(tangent)}});
  }

  const GapReport g = duality_gap(b.model, b.priors, b.utility, r.solver);
  record("weak_duality", g.weak_duality_ok, {{"worst_iterate_pair", report_number(g.worst_pair)}});
  record("strong_duality", g.success, {{"gap", report_number(g.gap)}, {"tol", report_number(r.solver.tol)}});
  record("variational_bound", check_variational_bound(g.dual_result, b.utility),
         {{"dual", report_number(g.dual)}, {"v_at_zero", report_number(b.utility.v_at_zero())}});

  const std::size_t n = b.model.scenario_count();
  if (n <= 4) {
    double worst_excess = -kInf;
    double worst_abs = 0.0;
    bool ok = true;
    for (int k = 0; k < 3; ++k) {
      Vector nu(n);
      for (double& v : nu) v = 0.2 + 1.3 * uniform(rng);
      const ConjugateCheckReport c = conjugate_identity_check(b.utility, b.priors, b.model.claim, nu);
      if (c.infinite_agreement()) continue;
      worst_excess = std::max(worst_excess, c.young_excess());
      worst_abs = std::max(worst_abs, std::abs(c.young_excess()));
      ok = ok && c.young_excess() <= 1e-8 && std::abs(c.young_excess()) <= 1e-3;
    }
    record("conjugate_identity", ok,
           {{"max_excess", report_number(worst_excess)}, {"max_abs_diff", report_number(worst_abs)}});
  } else {
    checks.push_back({{"name", "conjugate_identity"}, {"pass", true}, {"skipped", "more than 4 scenarios"}});
    s += fmt::format("{:<22}skipped (n > 4)\n", "conjugate_identity");
  }

  const auto mixing = epsilon_mixing_table(b.model, b.priors, b.utility, r.epsilons, g.dual, r.solver);
  double shift = 0.0;
  for (const MixingRow& m : mixing) shift = std::max(shift, std::abs(m.shift));
  record("epsilon_mixing", shift <= 5e-6, {{"table", to_json(mixing)}});

  json body = {{"checks", std::move(checks)}, {"all_pass", all}, {"config", config_echo(b)}, {"resolved", resolved_echo(r)}};
  emit(make_report("verify", std::move(body)), a, s, out);
  return all ? kOk : kTolerance;
}

int cmd_examples(const CommonArgs& a, int n_max, double gamma, std::ostream& out) {
  const TruncatedCountableSpace space = example1_build(n_max);
  const bool exact = n_max <= kExactLimit;
  json rows = json::array();
  bool tail_constant = true;
  bool ui_nonincreasing = true;
  double previous_ui = kInf;
  std::string s = fmt::format("{:>4} {:>12} {:>10} {:>14} {:>14}\n", "N", "E_PN[W]", "tail", "prior_ui", "1/n_N");
  for (int N = 2; N <= n_max; ++N) {
    double ew = example1_expected_w(space, N);
    double tail = example1_tail_modulus(space, N);
    double ui = example1_priors_ui_modulus(space, N);
    json row = {{"N", N}};
    if (exact) {
      const Fraction ew_q = example1_expected_w_exact(n_max, N);
      const Fraction tail_q = example1_tail_modulus_exact(n_max, N);
      const Fraction ui_q = example1_priors_ui_modulus_exact(n_max, N);
      const Fraction untrunc = example1_priors_ui_formula(n_max, N, false);
      ew = ew_q.to_double();
      tail = tail_q.to_double();
      ui = ui_q.to_double();
      row["expected_w"] = fmt::format("{}/{}", ew_q.num, ew_q.den);
      row["tail_modulus"] = fmt::format("{}/{}", tail_q.num, tail_q.den);
      row["prior_ui_modulus"] = fmt::format("{}/{}", ui_q.num, ui_q.den);
      row["untruncated_formula"] = fmt::format("{}/{}", untrunc.num, untrunc.den);
      tail_constant = tail_constant && tail_q == Fraction{1, 1};
      s += fmt::format("{:>4} {:>12} {:>10} {:>14} {:>14}\n", N, row["expected_w"].get<std::string>(),
                       row["tail_modulus"].get<std::string>(), row["prior_ui_modulus"].get<std::string>(),
                       row["untruncated_formula"].get<std::string>());
    } else {
      row["expected_w"] = report_number(ew);
      row["tail_modulus"] = report_number(tail);
      row["prior_ui_modulus"] = report_number(ui);
      tail_constant = tail_constant && std::abs(tail - 1.0) <= 1e-12;
      s += fmt::format("{:>4} {:>12.10g} {:>10.6g} {:>14.6g} {:>14}\n", N, ew, tail, ui, "-");
    }
    ui_nonincreasing = ui_nonincreasing && ui <= previous_ui;
    previous_ui = ui;
    rows.push_back(std::move(row));
  }
  const Example2Report e2 = example2_membership(space, gamma);
  s += fmt::format("tail modulus constant 1: {}\nprior ui-modulus nonincreasing: {}\n", tail_constant ? "yes" : "no",
                   ui_nonincreasing ? "yes" : "no");
  s += fmt::format("W^gamma modulus (gamma = {:g}) nonincreasing: {}, reaches 0: {}\n", gamma,
                   e2.gamma_nonincreasing ? "yes" : "no", e2.gamma_vanishes ? "yes" : "no");

  json body = {{"n_max", n_max},
               {"exact", exact},
               {"renormalizer", report_number(space.renormalizer)},
               {"example1", std::move(rows)},
               {"tail_modulus_constant", tail_constant},
               {"prior_ui_nonincreasing", ui_nonincreasing},
               {"example2", to_json(e2)}};
  emit(make_report("examples", std::move(body)), a, s, out);
  return tail_constant && ui_nonincreasing && e2.gamma_nonincreasing && e2.one_constant ? kOk : kTolerance;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust utility maximisation: primal and dual solvers on finite markets", "rdual"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rdual 0.1.0");

  CommonArgs solve_args, price_args, verify_args, example_args;
  std::string claim;
  bool no_oracle = false;
  int n_max = 12;
  double gamma = 0.5;

  auto* solve = app.add_subcommand("solve", "Solve primal and dual problems and report the gap");
  add_common(solve, solve_args, true);
  auto* price = app.add_subcommand("price", "Robust indifference prices of a claim");
  add_common(price, price_args, true);
  price->add_option("--claim", claim, "Name of a claim from the [claims] section");
  price->add_flag("--no-oracle", no_oracle, "Skip the bisection cross-check");
  auto* verify = app.add_subcommand("verify", "Run the invariant checks on a scenario");
  add_common(verify, verify_args, true);
  auto* examples = app.add_subcommand("examples", "Countable-space example diagnostics");
  add_common(examples, example_args, false);
  examples->add_option("--n-max", n_max, "Truncation level")->envname("RDUAL_N_MAX")->check(CLI::Range(3, 60));
  examples->add_option("--gamma", gamma, "Exponent for the W^gamma family")->check(CLI::Range(0.01, 0.99));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*solve) return cmd_solve(solve_args, out);
    if (*price) return cmd_price(price_args, claim, !no_oracle, out);
    if (*verify) return cmd_verify(verify_args, out);
    return cmd_examples(example_args, n_max, gamma, out);
  } catch (const ValidationError& e) {
    if (e.assumption().size() == 2 && e.assumption()[0] == 'A')
      fmt::print(err, "validation error [{}]: {}\n", e.assumption(), e.what());
    else
      fmt::print(err, "validation error: {}\n", e.what());
    return kValidation;
  } catch (const ParseError& e) {
    fmt::print(err, "parse error: {}\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    fmt::print(err, "internal error: {}\n", e.what());
    return kInternal;
  }
}

}  // namespace rdual::cli
