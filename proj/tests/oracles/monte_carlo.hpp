#pragma once

// Test-only pricing oracle, deliberately independent of the library's solvers and pricer.

#include "heston/model.hpp"

#include <cstdint>

namespace oracle {

struct McEstimate {
    double price = 0.0;
    double std_error = 0.0;
    long pairs = 0;
};

/// European call by full-truncation Euler in v and log-Euler in s, antithetic pairs.
/// `paths` counts both members of each pair.
McEstimate heston_call_mc(const heston::HestonParams& p, double s0, double v0, double strike, double maturity,
                          long paths, int steps, std::uint64_t seed);

}  // namespace oracle
