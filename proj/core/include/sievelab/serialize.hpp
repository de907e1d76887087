#pragma once

#include <string>

#include <json.hpp>

#include "sievelab/exact_engine.hpp"
#include "sievelab/sieve_sim.hpp"
#include "sievelab/stats.hpp"

namespace sievelab {

// Infinity serializes as the string "inf" so payloads stay portable across
// JSON readers.
nlohmann::json json_number(double v);

nlohmann::json to_json(const PatternPmf& pmf);
nlohmann::json to_json(const MarginalTable& table);
nlohmann::json to_json(const FiniteMarginals& marginals);
nlohmann::json to_json(const LimitMarginal& marginal);

// Same schema as PatternPmf (entries with pattern + probability, plus the
// covered/tail header) so empirical and exact tables diff directly.
nlohmann::json to_json(const EmpiricalPmf& pmf);

nlohmann::json to_json(const KrSummary& summary);
nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const ConvergenceTable& table);

std::string to_csv(const PatternPmf& pmf);
std::string to_csv(const EmpiricalPmf& pmf);
std::string to_csv(const LimitMarginal& marginal);
std::string to_csv(const ConvergenceTable& table);
std::string to_csv(const ComparisonReport& report);

}  // namespace sievelab
