#pragma once

#include <cstdint>
#include <vector>

namespace flowsentry {

/// Indices ordered by descending score, ties broken by ascending index.
std::vector<int> rank_descending(const std::vector<double>& scores);

/// Probability that a random positive outscores a random negative, ties
/// counting one half (Mann-Whitney rank statistic). MetricError unless both
/// classes are present.
double roc_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels);

/// Area under the precision-recall steps of the descending-score ranking.
/// MetricError without at least one positive.
double average_precision(const std::vector<double>& scores,
                         const std::vector<std::uint8_t>& labels);

/// Fraction of the k highest-scored items with label 1. MetricError unless
/// 1 <= k <= n.
double precision_at_k(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels,
                      std::size_t k);

}  // namespace flowsentry
