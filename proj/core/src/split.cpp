#include "flowsentry/split.hpp"

#include <cmath>

#include "flowsentry/error.hpp"
#include "flowsentry/rng.hpp"

namespace flowsentry {

DatasetSplit split_dataset(const std::vector<std::string>& graph_ids,
                           const std::array<double, 3>& ratios, std::uint64_t seed) {
  if (graph_ids.empty()) {
    throw ConfigError("cannot split an empty id list");
  }
  for (const double r : ratios) {
    if (!(r > 0.0)) {
      throw ConfigError("split ratios must be positive");
    }
  }
  const double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1, got " + std::to_string(total));
  }

  std::vector<std::string> shuffled = graph_ids;
  Rng rng(seed);
  rng.shuffle(shuffled);

  const auto n = static_cast<double>(shuffled.size());
  const auto train_end = static_cast<std::size_t>(std::floor(n * ratios[0]));
  const auto val_end = static_cast<std::size_t>(std::floor(n * (ratios[0] + ratios[1])));

  DatasetSplit split;
  split.train.assign(shuffled.begin(), shuffled.begin() + train_end);
  split.val.assign(shuffled.begin() + train_end, shuffled.begin() + val_end);
  split.test.assign(shuffled.begin() + val_end, shuffled.end());
  return split;
}

}  // namespace flowsentry
