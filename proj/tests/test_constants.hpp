#pragma once

// Empirical regression pins. Changing a value here needs a new seed run and a
// note in the commit message; the asymptotic bounds these guard carry no
// explicit constants.

#include <cstdint>

namespace test_constants {

inline constexpr int kConstantsVersion = 1;

// Positional estimator displacement guard: n = 20, beta = 2, p = 0.5, r = 60.
inline constexpr std::uint64_t kDeviationSeed = 20210413;
inline constexpr int kDeviationTrials = 200;
inline constexpr std::size_t kDeviationThreshold = 6;
inline constexpr double kDeviationMaxFraction = 0.05;

}  // namespace test_constants
