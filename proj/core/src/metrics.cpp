#include "flowsentry/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "flowsentry/error.hpp"

namespace flowsentry {

namespace {

void require_equal_lengths(const std::vector<double>& scores,
                           const std::vector<std::uint8_t>& labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("scores and labels differ in length");
  }
  if (scores.empty()) {
    throw MetricError("empty input");
  }
  for (const auto label : labels) {
    if (label != 0 && label != 1) {
      throw DataError("label not in {0,1}");
    }
  }
}

}  // namespace

std::vector<int> rank_descending(const std::vector<double>& scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&scores](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)]) {
      return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    }
    return a < b;
  });
  return order;
}

double roc_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
  require_equal_lengths(scores, labels);
  const std::size_t positives = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), static_cast<std::uint8_t>(1)));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw MetricError("roc_auc needs both classes, got " + std::to_string(positives) +
                      " positives out of " + std::to_string(labels.size()));
  }

  // Midranks handle ties exactly: the rank sum over positives equals the
  // pair count #(pos > neg) + #ties/2 plus a constant.
  std::vector<int> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&scores](int a, int b) {
    return scores[static_cast<std::size_t>(a)] < scores[static_cast<std::size_t>(b)];
  });

  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           scores[static_cast<std::size_t>(order[j + 1])] ==
               scores[static_cast<std::size_t>(order[i])]) {
      ++j;
    }
    // ranks are 1-based; tied block [i, j] shares the midrank
    const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[static_cast<std::size_t>(order[k])] == 1) positive_rank_sum += midrank;
    }
    i = j + 1;
  }

  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

double average_precision(const std::vector<double>& scores,
                         const std::vector<std::uint8_t>& labels) {
  require_equal_lengths(scores, labels);
  const std::size_t positives = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), static_cast<std::uint8_t>(1)));
  if (positives == 0) {
    throw MetricError("average_precision needs at least one positive");
  }
  const std::vector<int> order = rank_descending(scores);
  // literal step sum: AP = sum_k (R_k - R_{k-1}) * P_k over the ranking
  double ap = 0.0;
  double recall_prev = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (labels[static_cast<std::size_t>(order[k])] != 1) continue;
    ++hits;
    const double recall = static_cast<double>(hits) / static_cast<double>(positives);
    const double precision = static_cast<double>(hits) / static_cast<double>(k + 1);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
  }
  return ap;
}

double precision_at_k(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels,
                      std::size_t k) {
  require_equal_lengths(scores, labels);
  if (k < 1 || k > scores.size()) {
    throw MetricError("k = " + std::to_string(k) + " out of range [1, " +
                      std::to_string(scores.size()) + "]");
  }
  const std::vector<int> order = rank_descending(scores);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (labels[static_cast<std::size_t>(order[i])] == 1) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

}  // namespace flowsentry
