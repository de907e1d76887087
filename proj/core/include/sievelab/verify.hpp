#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sievelab/version.hpp"

namespace sievelab {

enum class VerifySuite { Basic, Full };

struct VerifyOptions {
  std::uint64_t seed = kDefaultSeed;
  int workers = 0;  // 0: hardware concurrency
  VerifySuite suite = VerifySuite::Basic;
};

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool pass = false;
  nlohmann::json details;
  double seconds = 0.0;
};

// Runs the verification checks. Basic covers criteria 1-11; Full adds the
// reproducibility check, which replays the basic suite and compares
// payloads byte for byte. Results are a pure function of (seed); the worker
// count only changes the wall time.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

bool all_passed(const std::vector<CheckResult>& results);

// Deterministic data payload (no timings, no timestamps).
nlohmann::json verification_report(const std::vector<CheckResult>& results,
                                   const VerifyOptions& options);

}  // namespace sievelab
