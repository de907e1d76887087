#include "sievelab/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace sievelab {

namespace {

std::string num(double v) {
  if (std::isinf(v)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string dash_key(const std::vector<int>& key) {
  std::string out;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(key[i]);
  }
  return out;
}

}  // namespace

nlohmann::json json_number(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

nlohmann::json to_json(const PatternPmf& pmf) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [pattern, mass] : pmf.entries) {
    entries.push_back({{"pattern", pattern.parts()}, {"probability", mass}});
  }
  return {{"n", pmf.n},
          {"k_max", pmf.k_max},
          {"covered_mass", pmf.covered_mass},
          {"tail_bound", pmf.tail_bound},
          {"entries", std::move(entries)}};
}

nlohmann::json to_json(const MarginalTable& table) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [value, mass] : table.pmf)
    entries.push_back({{"value", value}, {"probability", mass}});
  return {{"tail_bound", table.tail_bound}, {"entries", std::move(entries)}};
}

nlohmann::json to_json(const FiniteMarginals& marginals) {
  nlohmann::json z = nlohmann::json::array();
  for (const auto& table : marginals.z) z.push_back(to_json(table));
  nlohmann::json r = nlohmann::json::array();
  for (const auto& table : marginals.r_counts) r.push_back(to_json(table));
  nlohmann::json er = nlohmann::json::array();
  for (const double e : marginals.expected_r_count) er.push_back(e);
  return {{"n", marginals.n},
          {"k_max", marginals.k_max},
          {"tail_bound", marginals.tail_bound},
          {"z", std::move(z)},
          {"leftmost_index", to_json(marginals.leftmost_index)},
          {"occupied", to_json(marginals.occupied)},
          {"r_counts", std::move(r)},
          {"expected_r_count", std::move(er)}};
}

nlohmann::json to_json(const LimitMarginal& marginal) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [value, mass] : marginal.pmf)
    entries.push_back({{"value", value}, {"probability", mass}});
  return {{"coordinate", marginal.coordinate},
          {"tail_bound", marginal.tail_bound},
          {"prefix_residual", marginal.prefix_residual},
          {"entries", std::move(entries)}};
}

nlohmann::json to_json(const EmpiricalPmf& pmf) {
  nlohmann::json entries = nlohmann::json::array();
  const double reps = static_cast<double>(pmf.replicates);
  for (const auto& [key, count] : pmf.counts) {
    entries.push_back({{"pattern", key},
                       {"probability", static_cast<double>(count) / reps},
                       {"count", count}});
  }
  return {{"replicates", pmf.replicates},
          {"covered_mass", 1.0},
          {"tail_bound", 0.0},
          {"entries", std::move(entries)}};
}

nlohmann::json to_json(const KrSummary& summary) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < summary.sum.size(); ++r) {
    rows.push_back({{"r", r},
                    {"mean", summary.mean(static_cast<int>(r))},
                    {"se", summary.standard_error(static_cast<int>(r))}});
  }
  return {{"replicates", summary.replicates}, {"rows", std::move(rows)}};
}

nlohmann::json to_json(const ComparisonReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : report.cells) {
    cells.push_back({{"key", cell.key},
                     {"expected", cell.expected_count},
                     {"observed", cell.observed_count},
                     {"pooled", cell.pooled}});
  }
  return {{"tv_distance", report.tv_distance},
          {"observed_excluded", report.observed_excluded},
          {"expected_excluded", report.expected_excluded},
          {"chi_square", json_number(report.chi_square)},
          {"df", report.df},
          {"p_value", report.p_value},
          {"replicates", report.replicates},
          {"min_expected", report.min_expected},
          {"expected_tail_bound", report.expected_tail_bound},
          {"cells", std::move(cells)}};
}

nlohmann::json to_json(const ConvergenceTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"n", row.n},
                    {"estimate", row.estimate},
                    {"se", row.se},
                    {"gap", json_number(row.gap)}});
  }
  return {{"monotone", table.monotone},
          {"divergence_mode", table.divergence_mode},
          {"rows", std::move(rows)}};
}

std::string to_csv(const PatternPmf& pmf) {
  std::string out;
  out += "# n=" + std::to_string(pmf.n) + " k_max=" + std::to_string(pmf.k_max) +
         " covered_mass=" + num(pmf.covered_mass) +
         " tail_bound=" + num(pmf.tail_bound) + "\n";
  out += "pattern,probability\n";
  for (const auto& [pattern, mass] : pmf.entries)
    out += pattern.dash() + "," + num(mass) + "\n";
  return out;
}

std::string to_csv(const EmpiricalPmf& pmf) {
  std::string out;
  out += "# replicates=" + std::to_string(pmf.replicates) + "\n";
  out += "pattern,probability\n";
  const double reps = static_cast<double>(pmf.replicates);
  for (const auto& [key, count] : pmf.counts)
    out += dash_key(key) + "," + num(static_cast<double>(count) / reps) + "\n";
  return out;
}

std::string to_csv(const LimitMarginal& marginal) {
  std::string out;
  out += "# coordinate=" + std::to_string(marginal.coordinate) +
         " tail_bound=" + num(marginal.tail_bound) +
         " prefix_residual=" + num(marginal.prefix_residual) + "\n";
  out += "value,probability\n";
  for (const auto& [value, mass] : marginal.pmf)
    out += std::to_string(value) + "," + num(mass) + "\n";
  return out;
}

std::string to_csv(const ConvergenceTable& table) {
  std::string out = "n,estimate,se,gap\n";
  for (const auto& row : table.rows)
    out += num(row.n) + "," + num(row.estimate) + "," + num(row.se) + "," +
           num(row.gap) + "\n";
  return out;
}

std::string to_csv(const ComparisonReport& report) {
  std::string out;
  out += "# tv=" + num(report.tv_distance) + " chi_square=" + num(report.chi_square) +
         " df=" + std::to_string(report.df) + " p=" + num(report.p_value) + "\n";
  out += "key,expected,observed,pooled\n";
  for (const auto& cell : report.cells)
    out += dash_key(cell.key) + "," + num(cell.expected_count) + "," +
           num(cell.observed_count) + "," + (cell.pooled ? "1" : "0") + "\n";
  return out;
}

}  // namespace sievelab
