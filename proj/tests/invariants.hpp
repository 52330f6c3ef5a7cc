#pragma once

// Module invariants as parameterised checks over (n, seed). The doctest
// property suite and the acceptance binary both run this list.

#include "gaborfio/lattice.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gaborfio::testing {

struct CheckResult {
    bool pass = true;
    std::string detail;
};

struct Invariant {
    std::string module;
    std::string name;
    std::function<CheckResult(int n, std::uint64_t seed)> run;
};

const std::vector<Invariant>& invariant_suite();

inline const std::vector<int> property_sizes{16, 32, 64};
inline const std::vector<std::uint64_t> property_seeds{0, 1, 2};

// shared fixtures

/// diag(a, b) with a * b = n / 4 and a / b in {1, 2}.
Lattice density4_lattice(const Grid& grid);
/// Gaussian window tightened on density4_lattice.
GaborFrameSpec tight_gaussian_spec(const Grid& grid);

} // namespace gaborfio::testing
