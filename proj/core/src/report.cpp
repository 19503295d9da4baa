#include "rdual/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace rdual {

using nlohmann::json;

json report_number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

json report_vector(const Vector& v) {
  json out = json::array();
  for (double x : v) out.push_back(report_number(x));
  return out;
}

namespace {

json index_list(const std::vector<std::size_t>& v) {
  json out = json::array();
  for (std::size_t i : v) out.push_back(i);
  return out;
}

}  // namespace

json to_json(const PrimalResult& r) {
  json theta = json::array();
  for (const auto& level : r.theta_hat.holdings()) {
    json cells = json::array();
    for (const Vector& h : level) cells.push_back(report_vector(h));
    theta.push_back(std::move(cells));
  }
  return {{"value", report_number(r.value)},
          {"theta", std::move(theta)},
          {"iterations", r.iterations},
          {"active_vertices", index_list(r.active_vertices)},
          {"prior_weights", report_vector(r.prior_weights)},
          {"converged", r.converged},
          {"gap_bound", report_number(r.gap_bound)}};
}

json to_json(const DualResult& r) {
  return {{"value", report_number(r.value)},
          {"lambda", report_number(r.lambda_hat)},
          {"q", report_vector(r.q_hat)},
          {"q_support", index_list(r.q_support)},
          {"prior_weights", report_vector(r.p_weights)},
          {"p", report_vector(r.p_hat)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"gap_bound", report_number(r.gap_bound)}};
}

json to_json(const GapReport& r) {
  return {{"primal", to_json(r.primal_result)},
          {"dual", to_json(r.dual_result)},
          {"gap", report_number(r.gap)},
          {"worst_iterate_pair", report_number(r.worst_pair)},
          {"weak_duality_ok", r.weak_duality_ok},
          {"success", r.success}};
}

json to_json(const PriceReport& r) {
  return {{"p_b", report_number(r.p_b)},
          {"p_s", report_number(r.p_s)},
          {"gamma_at_q", report_number(r.gamma_at_qhat)},
          {"v0", report_number(r.v0)},
          {"oracle_price", report_number(r.oracle_price)},
          {"method_agreement", report_number(r.method_agreement)},
          {"q", report_vector(r.q_hat)},
          {"formula_residual", report_number(r.formula_residual)}};
}

json to_json(const std::vector<MixingRow>& rows) {
  json out = json::array();
  for (const MixingRow& m : rows)
    out.push_back({{"epsilon", report_number(m.epsilon)},
                   {"value", report_number(m.value)},
                   {"shift", report_number(m.shift)}});
  return out;
}

json to_json(const Example2Report& r) {
  json rows = json::array();
  for (const Example2Row& row : r.rows)
    rows.push_back({{"N", report_number(row.threshold)},
                    {"gamma", report_number(row.modulus_gamma)},
                    {"one", report_number(row.modulus_one)},
                    {"zero", report_number(row.modulus_zero)}});
  return {{"gamma", report_number(r.gamma)},
          {"rows", std::move(rows)},
          {"gamma_nonincreasing", r.gamma_nonincreasing},
          {"gamma_vanishes", r.gamma_vanishes},
          {"one_constant", r.one_constant}};
}

json config_echo(const ScenarioBundle& b) {
  json coeffs = json::array();
  for (const ExpTerm& t : b.utility_config.coefficients)
    coeffs.push_back({report_number(t.weight), report_number(t.rate)});
  json claims = json::array();
  for (const auto& [name, v] : b.named_claims) claims.push_back(name);
  return {{"scenarios", b.model.scenario_count()},
          {"assets", b.model.market.asset_count()},
          {"periods", b.model.market.horizon()},
          {"prior_vertices", b.priors.size()},
          {"named_claims", std::move(claims)},
          {"utility",
           {{"name", b.utility_config.name},
            {"risk_aversion", report_number(b.utility_config.risk_aversion)},
            {"coefficients", std::move(coeffs)},
            {"numeric", b.utility_config.numeric}}},
          {"solver",
           {{"tol", report_number(b.solver.tol)}, {"max_iter", b.solver.max_iter}, {"seed", b.solver.seed}}}};
}

json make_report(const std::string& command, json body) {
  json out = {{"schema", kReportSchema}, {"command", command}};
  out.update(body);
  return out;
}

}  // namespace rdual
