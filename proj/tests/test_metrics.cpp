#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "flowsentry/error.hpp"
#include "flowsentry/metrics.hpp"

using namespace flowsentry;

namespace {

// O(n^2) pair-counting oracle: ties contribute one half.
double oracle_roc_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / static_cast<double>(pairs);
}

// Literal precision-recall step sum over the descending ranking.
double oracle_average_precision(const std::vector<double>& scores,
                                const std::vector<std::uint8_t>& labels) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  const double positives =
      static_cast<double>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  double ap = 0.0;
  double recall_prev = 0.0;
  double hits = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]] == 1) hits += 1.0;
    const double recall = hits / positives;
    const double precision = hits / static_cast<double>(k + 1);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
  }
  return ap;
}

double oracle_precision_at_k(const std::vector<double>& scores,
                             const std::vector<std::uint8_t>& labels, std::size_t k) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += labels[order[i]];
  return static_cast<double>(hits) / static_cast<double>(k);
}

struct Instance {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

// Random instance with deliberate score ties (values snap to a coarse grid)
// and both classes present.
Instance random_instance(unsigned seed, std::size_t n = 30) {
  std::mt19937 gen(seed);
  std::uniform_int_distribution<int> grid(0, 9);
  std::bernoulli_distribution positive(0.35);
  Instance inst;
  inst.scores.resize(n);
  inst.labels.resize(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      inst.scores[i] = 0.1 * grid(gen);
      inst.labels[i] = positive(gen) ? 1 : 0;
    }
    const auto pos = std::count(inst.labels.begin(), inst.labels.end(), std::uint8_t{1});
    if (pos > 0 && pos < static_cast<long>(n)) return inst;
  }
}

}  // namespace

TEST_CASE("perfect ranking scores AUC 1") {
  CHECK(roc_auc({0.9, 0.8, 0.1}, {1, 0, 0}) == 1.0);
}

TEST_CASE("inverted ranking scores AUC 0") {
  CHECK(roc_auc({0.2, 0.8}, {1, 0}) == 0.0);
}

TEST_CASE("roc_auc matches the pair-counting oracle exactly") {
  for (unsigned seed = 0; seed < 200; ++seed) {
    const auto inst = random_instance(seed);
    CHECK(roc_auc(inst.scores, inst.labels) == oracle_roc_auc(inst.scores, inst.labels));
  }
}

TEST_CASE("single-class input is a metric error") {
  CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1, 1}), MetricError);
  CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {0, 0}), MetricError);
}

TEST_CASE("all positives ranked first gives AP 1") {
  CHECK(average_precision({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
}

TEST_CASE("single positive ranked last gives AP 1/n") {
  const std::size_t n = 5;
  std::vector<double> scores{0.9, 0.8, 0.7, 0.6, 0.1};
  std::vector<std::uint8_t> labels{0, 0, 0, 0, 1};
  CHECK(average_precision(scores, labels) == doctest::Approx(1.0 / n));
}

TEST_CASE("average precision matches the step oracle within 1e-12") {
  for (unsigned seed = 0; seed < 200; ++seed) {
    const auto inst = random_instance(seed + 1000);
    CHECK(std::abs(average_precision(inst.scores, inst.labels) -
                   oracle_average_precision(inst.scores, inst.labels)) < 1e-12);
  }
}

TEST_CASE("avg precision without positives is a metric error") {
  CHECK_THROWS_AS(average_precision({0.5}, {0}), MetricError);
}

TEST_CASE("four of the top five positive gives precision 0.8") {
  const std::vector<double> scores{9, 8, 7, 6, 5, 4, 3};
  const std::vector<std::uint8_t> labels{1, 1, 0, 1, 1, 1, 0};
  CHECK(precision_at_k(scores, labels, 5) == doctest::Approx(0.8));
}

TEST_CASE("precision at n equals the positive rate") {
  const std::vector<double> scores{0.3, 0.9, 0.8, 0.2};
  const std::vector<std::uint8_t> labels{0, 1, 0, 1};
  CHECK(precision_at_k(scores, labels, 4) == doctest::Approx(0.5));
}

TEST_CASE("precision_at_k matches the sort-then-count oracle exactly") {
  for (unsigned seed = 0; seed < 200; ++seed) {
    const auto inst = random_instance(seed + 2000);
    for (const std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{30}}) {
      CHECK(precision_at_k(inst.scores, inst.labels, k) ==
            oracle_precision_at_k(inst.scores, inst.labels, k));
    }
  }
}

TEST_CASE("k outside [1, n] is a metric error") {
  CHECK_THROWS_AS(precision_at_k({0.5, 0.6}, {0, 1}, 0), MetricError);
  CHECK_THROWS_AS(precision_at_k({0.5, 0.6}, {0, 1}, 3), MetricError);
}

TEST_CASE("precision_at_k with uniform labels equals that label") {
  const std::vector<double> scores{0.4, 0.2, 0.9};
  for (std::size_t k = 1; k <= 3; ++k) {
    CHECK(precision_at_k(scores, {1, 1, 1}, k) == 1.0);
    CHECK(precision_at_k(scores, {0, 0, 0}, k) == 0.0);
  }
}

TEST_CASE("metrics are invariant under strictly increasing transforms") {
  for (unsigned seed = 0; seed < 50; ++seed) {
    const auto inst = random_instance(seed + 3000);
    std::vector<double> mapped(inst.scores.size());
    for (std::size_t i = 0; i < mapped.size(); ++i) mapped[i] = 3.0 * inst.scores[i] - 11.0;
    CHECK(roc_auc(mapped, inst.labels) == roc_auc(inst.scores, inst.labels));
    CHECK(average_precision(mapped, inst.labels) ==
          average_precision(inst.scores, inst.labels));
    CHECK(precision_at_k(mapped, inst.labels, 7) ==
          precision_at_k(inst.scores, inst.labels, 7));
  }
}

TEST_CASE("negating tie-free scores complements the AUC") {
  std::mt19937 gen(77);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> scores(25);
  std::vector<std::uint8_t> labels(25);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = dist(gen);  // continuous draws: ties have measure zero
    labels[i] = i % 3 == 0 ? 1 : 0;
  }
  std::vector<double> negated(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) negated[i] = -scores[i];
  CHECK(roc_auc(scores, labels) + roc_auc(negated, labels) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mismatched lengths and bad labels are rejected") {
  CHECK_THROWS_AS(roc_auc({0.1}, {1, 0}), ShapeError);
  CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1, 2}), DataError);
}
