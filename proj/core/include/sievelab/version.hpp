#pragma once

#include <cstdint>
#include <string_view>

namespace sievelab {

inline constexpr std::string_view kVersion = "0.1.0";

// Default master seed used by the CLI when neither --seed nor
// SIEVE_LAB_SEED is given. Fixed so that runs are reproducible by default.
inline constexpr std::uint64_t kDefaultSeed = 0xB5EE;

}  // namespace sievelab
