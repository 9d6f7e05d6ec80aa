#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace flowsentry {

/// Disjoint, exhaustive partition of graph identifiers.
struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

/// Deterministic shuffle by seed, then contiguous cuts at floor(n*r_train)
/// and floor(n*(r_train+r_val)); the test set takes the remainder. Ratios
/// must be positive and sum to 1 within 1e-9 (ConfigError otherwise).
DatasetSplit split_dataset(const std::vector<std::string>& graph_ids,
                           const std::array<double, 3>& ratios, std::uint64_t seed);

}  // namespace flowsentry
