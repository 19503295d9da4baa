#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "rdual/countable_examples.hpp"
#include "rdual/pricing.hpp"
#include "rdual/scenario_io.hpp"
#include "rdual/solvers.hpp"

namespace rdual {

inline constexpr const char* kReportSchema = "rdual.report/1";

/// Rounds to 12 significant digits. Infinities become the strings "inf" and
/// "-inf", NaN becomes null.
nlohmann::json report_number(double x);
nlohmann::json report_vector(const Vector& v);

nlohmann::json to_json(const PrimalResult& r);
nlohmann::json to_json(const DualResult& r);
nlohmann::json to_json(const GapReport& r);
nlohmann::json to_json(const PriceReport& r);
nlohmann::json to_json(const std::vector<MixingRow>& rows);
nlohmann::json to_json(const Example2Report& r);

/// Echo of the parsed scenario: dimensions, utility and solver settings.
nlohmann::json config_echo(const ScenarioBundle& bundle);

/// {"schema": ..., "command": command} merged with body.
nlohmann::json make_report(const std::string& command, nlohmann::json body);

}  // namespace rdual
