#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sievelab/app.hpp"

using nlohmann::json;

namespace {

struct CliOutput {
  int exit_code;
  std::string out;
  std::string err;
};

CliOutput invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = sievelab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json data_of(const CliOutput& result) {
  REQUIRE(result.exit_code == 0);
  return json::parse(result.out)["data"];
}

}  // namespace

TEST_CASE("limit-pmf single value") {
  const CliOutput r = invoke({"limit-pmf", "--law", "uniform", "--parts", "1"});
  const json data = data_of(r);
  CHECK(std::abs(data["probability"].get<double>() - 0.5) < 1e-12);
  const json meta = json::parse(r.out)["meta"];
  CHECK(meta["law"] == "uniform");
  CHECK(meta["seed"] == 0xB5EE);
}

TEST_CASE("expected-kr values and infinity marker") {
  const json data =
      data_of(invoke({"expected-kr", "--law", "uniform", "--rmax", "2"}));
  CHECK(std::abs(data["values"][0].get<double>() - 1.0) < 1e-12);
  CHECK(std::abs(data["values"][1].get<double>() - 1.0) < 1e-12);
  CHECK(std::abs(data["values"][2].get<double>() - 0.5) < 1e-12);

  const json heavy =
      data_of(invoke({"expected-kr", "--law", "heavy:1", "--rmax", "1"}));
  CHECK(heavy["values"][0] == "inf");
}

TEST_CASE("exact-pattern table contains the oracle cell") {
  const CliOutput r =
      invoke({"exact-pattern", "--law", "uniform", "--n", "3", "--kmax", "12"});
  const json data = data_of(r);
  bool found = false;
  for (const auto& entry : data["pmf"]["entries"]) {
    if (entry["pattern"] == json::array({2, 1})) {
      found = true;
      CHECK(std::abs(entry["probability"].get<double>() - 1.0 / 12) < 1e-12);
    }
  }
  CHECK(found);

  const CliOutput csv = invoke({"exact-pattern", "--law", "uniform", "--n", "3",
                                "--kmax", "12", "--format", "csv"});
  CHECK(csv.exit_code == 0);
  CHECK(csv.out.find("pattern,probability\n") != std::string::npos);
  CHECK(csv.out.find("2-1,0.0833333") != std::string::npos);
}

TEST_CASE("moments emits mu, nu and the moment") {
  const json data = data_of(
      invoke({"moments", "--law", "beta-theta:2", "--a", "1", "--b", "0"}));
  CHECK(std::abs(data["moment"].get<double>() - 2.0 / 3) < 1e-12);
  CHECK(std::abs(data["mu"].get<double>() - 0.5) < 1e-12);

  const json heavy =
      data_of(invoke({"moments", "--law", "heavy:1", "--a", "0", "--b", "1"}));
  CHECK(heavy["nu"] == "inf");
}

TEST_CASE("simulate-sieve payloads are seed-deterministic and worker-invariant") {
  const std::vector<std::string> base = {"simulate-sieve", "--law", "uniform",
                                         "--n", "50", "--reps", "20000",
                                         "--stat", "z", "--seed", "31415"};
  auto with_workers = [&](const std::string& w) {
    std::vector<std::string> args = base;
    args.push_back("--workers");
    args.push_back(w);
    return invoke(args);
  };
  const CliOutput a = with_workers("1");
  const CliOutput b = with_workers("3");
  CHECK(a.exit_code == 0);
  CHECK(json::parse(a.out)["data"] == json::parse(b.out)["data"]);

  const CliOutput c = with_workers("1");
  CHECK(json::parse(a.out)["data"] == json::parse(c.out)["data"]);
}

TEST_CASE("environment seed is used unless --seed overrides it") {
  setenv("SIEVE_LAB_SEED", "123", 1);
  const CliOutput env = invoke({"limit-pmf", "--law", "uniform", "--parts", "1"});
  CHECK(json::parse(env.out)["meta"]["seed"] == 123);

  const CliOutput flag = invoke(
      {"limit-pmf", "--law", "uniform", "--parts", "1", "--seed", "99"});
  CHECK(json::parse(flag.out)["meta"]["seed"] == 99);

  setenv("SIEVE_LAB_SEED", "not-a-number", 1);
  const CliOutput bad = invoke({"limit-pmf", "--law", "uniform", "--parts", "1"});
  CHECK(bad.exit_code != 0);
  unsetenv("SIEVE_LAB_SEED");

  const CliOutput plain = invoke({"limit-pmf", "--law", "uniform", "--parts", "1"});
  CHECK(json::parse(plain.out)["meta"]["seed"] == 0xB5EE);
}

TEST_CASE("simulate-limit kr mode marks the infinite coordinate") {
  const json data = data_of(invoke({"simulate-limit", "--law", "heavy:1", "--reps",
                                    "200", "--kr", "1", "--seed", "7"}));
  CHECK(data["rows"][0]["mean"] == "inf");
  CHECK(data["rows"][1]["mean"].is_number());
}

TEST_CASE("simulate-limit depth mode emits an empirical table") {
  const json data = data_of(invoke({"simulate-limit", "--law", "uniform", "--reps",
                                    "5000", "--depth", "2", "--seed", "7"}));
  CHECK(data["empirical"]["replicates"] == 5000);
  CHECK(data["empirical"]["entries"].size() > 3);
}

TEST_CASE("usage errors exit nonzero with diagnostics") {
  CHECK(invoke({"no-such-command"}).exit_code != 0);
  CHECK(invoke({"limit-pmf", "--law", "uniform"}).exit_code != 0);
  CHECK(invoke({"limit-pmf", "--law", "gaussian", "--parts", "1"}).exit_code != 0);
  CHECK(invoke({"simulate-limit", "--law", "uniform", "--reps", "10"}).exit_code != 0);
  CHECK(invoke({"exact-pattern", "--law", "uniform", "--n", "12", "--kmax", "30"})
            .exit_code == 2);  // budget error
  const CliOutput bad = invoke({"limit-pmf", "--law", "gaussian", "--parts", "1"});
  CHECK(!bad.err.empty());
}

TEST_CASE("output file writing") {
  const std::string path = "/tmp/sievelab_test_out.json";
  const CliOutput r = invoke(
      {"limit-pmf", "--law", "uniform", "--parts", "1", "--out", path});
  CHECK(r.exit_code == 0);
  CHECK(r.out.empty());
  std::ifstream file(path);
  REQUIRE(file.good());
  json doc;
  file >> doc;
  CHECK(std::abs(doc["data"]["probability"].get<double>() - 0.5) < 1e-12);
  std::remove(path.c_str());
}

TEST_CASE("help exits cleanly") {
  CHECK(invoke({"--help"}).exit_code == 0);
}
