#include <doctest.h>

#include <limits>
#include <string>

#include "sievelab/exact_engine.hpp"
#include "sievelab/serialize.hpp"
#include "sievelab/sieve_sim.hpp"

using namespace sievelab;
using nlohmann::json;

TEST_CASE("infinity serializes as the string inf") {
  CHECK(json_number(std::numeric_limits<double>::infinity()) == json("inf"));
  CHECK(json_number(0.5) == json(0.5));
}

TEST_CASE("pattern pmf json schema") {
  const StickLaw law = StickLaw::uniform();
  const PatternPmf pmf = enumerate_finite(law, 3, 6);
  const json doc = to_json(pmf);
  CHECK(doc.contains("covered_mass"));
  CHECK(doc.contains("tail_bound"));
  CHECK(doc["n"] == 3);
  CHECK(doc["k_max"] == 6);
  bool found = false;
  for (const auto& entry : doc["entries"]) {
    CHECK(entry.contains("pattern"));
    CHECK(entry.contains("probability"));
    if (entry["pattern"] == json::array({2, 1})) {
      found = true;
      CHECK(std::abs(entry["probability"].get<double>() - 1.0 / 12) < 1e-12);
    }
  }
  CHECK(found);
}

TEST_CASE("pattern pmf csv has headers and dash-joined parts") {
  const StickLaw law = StickLaw::uniform();
  const PatternPmf pmf = enumerate_finite(law, 3, 4);
  const std::string csv = to_csv(pmf);
  CHECK(csv.find("pattern,probability\n") != std::string::npos);
  CHECK(csv.find("# n=3") != std::string::npos);
  CHECK(csv.find("covered_mass=") != std::string::npos);
  CHECK(csv.find("2-1,") != std::string::npos);
}

TEST_CASE("empirical pmf serializes with the exact-table schema") {
  EmpiricalPmf pmf;
  pmf.replicates = 8;
  pmf.counts[{2, 1}] = 6;
  pmf.counts[{3}] = 2;
  const json doc = to_json(pmf);
  CHECK(doc["entries"].size() == 2);
  CHECK(doc["entries"][0].contains("pattern"));
  CHECK(doc["entries"][0].contains("probability"));
  CHECK(doc["replicates"] == 8);
  const std::string csv = to_csv(pmf);
  CHECK(csv.find("pattern,probability\n") != std::string::npos);
  CHECK(csv.find("2-1,0.75") != std::string::npos);
}

TEST_CASE("comparison report and convergence table serialize") {
  ComparisonReport report;
  report.tv_distance = 0.01;
  report.chi_square = 2.5;
  report.df = 3;
  report.p_value = 0.47;
  report.cells.push_back({{1, 0}, 10.0, 12.0, false});
  const json doc = to_json(report);
  CHECK(doc["df"] == 3);
  CHECK(doc["cells"][0]["key"] == json::array({1, 0}));

  ConvergenceTable table;
  table.divergence_mode = true;
  table.monotone = true;
  table.rows.push_back({100.0, 2.0, 0.1, 2.0});
  const json tdoc = to_json(table);
  CHECK(tdoc["divergence_mode"] == true);
  const std::string csv = to_csv(table);
  CHECK(csv.rfind("n,estimate,se,gap\n", 0) == 0);
}

TEST_CASE("limit marginal serialization carries both residuals") {
  const StickLaw law = StickLaw::uniform();
  const LimitMarginal m = limit_marginal(law, 1, 10);
  const json doc = to_json(m);
  CHECK(doc["coordinate"] == 1);
  CHECK(doc.contains("tail_bound"));
  CHECK(doc.contains("prefix_residual"));
  CHECK(doc["entries"].size() == 10);
  const std::string csv = to_csv(m);
  CHECK(csv.find("value,probability\n") != std::string::npos);
}
