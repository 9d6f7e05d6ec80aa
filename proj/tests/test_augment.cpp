#include <cmath>

#include "doctest.h"
#include "flowsentry/augment.hpp"
#include "flowsentry/error.hpp"
#include "flowsentry/rng.hpp"
#include "test_util.hpp"

using namespace flowsentry;

namespace {

/// Straight-line re-implementation of the whole transformation over a
/// recorded p-vector: pseudo-labels, the three bands, nearest-neighbor swap,
/// group scaling. Shares no code with augment().
struct OracleResult {
  Matrix x_prime;
  std::vector<std::uint8_t> y_prime;
};

OracleResult oracle_augment(const WorkflowGraph& g, const std::vector<double>& p, double r,
                            double factor, bool strict_band) {
  const Matrix& x = g.features();
  const std::size_t n = g.node_count();
  OracleResult result;
  result.y_prime.assign(n, 0);
  result.x_prime = x;
  if (r == 0.0) return result;

  const double swap_lo = strict_band ? r / 2.0 : r / 4.0;
  for (std::size_t u = 0; u < n; ++u) {
    result.y_prime[u] = p[u] < r ? 1 : 0;
    const bool swap = p[u] >= swap_lo && p[u] <= 0.75 * r;
    if (!swap) continue;
    const auto& nbrs = g.neighbors(static_cast<int>(u));
    if (nbrs.empty()) continue;
    double best = -1.0;
    int chosen = -1;
    for (const int v : nbrs) {
      double dist = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) {
        dist += (x(u, j) - x(v, j)) * (x(u, j) - x(v, j));
      }
      dist = std::sqrt(dist);
      if (chosen < 0 || dist < best) {
        best = dist;
        chosen = v;
      }
    }
    for (std::size_t j = 0; j < x.cols(); ++j) result.x_prime(u, j) = x(chosen, j);
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (p[u] < 0.25 * r) {
      for (std::size_t j = 0; j < x.cols(); ++j) result.x_prime(u, j) *= factor;
    } else if (p[u] > 0.75 * r && p[u] < r) {
      for (std::size_t j = 0; j < x.cols(); ++j) result.x_prime(u, j) *= 1.0 / factor;
    }
  }
  return result;
}

}  // namespace

TEST_CASE("draw_mask selects the band [r/2, 3r/4]") {
  const std::vector<double> p{0.1, 0.45, 0.55, 0.7, 0.9};
  CHECK(draw_mask(p, 0.8) == std::vector<std::uint8_t>{0, 1, 1, 0, 0});
}

TEST_CASE("draw_mask at r=0 selects nothing, even p=0") {
  CHECK(draw_mask({0.0, 0.3, 0.7}, 0.0) == std::vector<std::uint8_t>{0, 0, 0});
}

TEST_CASE("draw_mask at r=1 covers [0.5, 0.75]") {
  CHECK(draw_mask({0.5}, 1.0) == std::vector<std::uint8_t>{1});
  CHECK(draw_mask({0.75}, 1.0) == std::vector<std::uint8_t>{1});
  CHECK(draw_mask({0.76}, 1.0) == std::vector<std::uint8_t>{0});
}

TEST_CASE("draw_mask selection fraction concentrates around r/4") {
  const double r = 0.8;
  const std::size_t n = 20000;
  Rng rng(4242);
  std::vector<double> p(n);
  for (auto& v : p) v = rng.uniform();
  const auto mask = draw_mask(p, r);
  std::size_t selected = 0;
  for (const auto m : mask) selected += m;
  const double q = r / 4.0;
  const double stderr_bound = 3.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(n));
  CHECK(std::abs(static_cast<double>(selected) / static_cast<double>(n) - q) <= stderr_bound);
}

TEST_CASE("neighbor_swap takes the closest neighbor's row") {
  // path 0-1-2: node 1 masked; node 0 at distance 1, node 2 at distance 2
  const Matrix x{{1, 0}, {2, 0}, {4, 0}};
  const auto g = fstest::path_graph(x);
  const Matrix out = neighbor_swap(g, {0, 1, 0});
  CHECK(out(1, 0) == 1.0);
  CHECK(out(0, 0) == 1.0);
  CHECK(out(2, 0) == 4.0);
}

TEST_CASE("empty mask leaves the features untouched") {
  const auto g = fstest::path_graph(fstest::random_matrix(4, 3, 500));
  CHECK(neighbor_swap(g, {0, 0, 0, 0}) == g.features());
}

TEST_CASE("distance ties break toward the lower node index") {
  // node 1 flanked by equidistant neighbors 0 and 2
  const Matrix x{{3, 0}, {2, 0}, {1, 0}};
  const auto g = fstest::path_graph(x);
  const Matrix out = neighbor_swap(g, {0, 1, 0});
  CHECK(out(1, 0) == 3.0);  // row of node 0, not node 2
}

TEST_CASE("isolated masked nodes pass through unchanged") {
  const WorkflowGraph g("iso", Matrix(2, 2), Matrix{{1, 2}, {3, 4}}, {"a", "b"});
  CHECK(neighbor_swap(g, {1, 1}) == g.features());
}

TEST_CASE("group_scale multiplies up rows and divides down rows") {
  const Matrix x{{1, 2}, {1, 2}, {7, 8}};
  const Matrix out = group_scale(x, {1, 0, 0}, {0, 1, 0}, 1.5);
  CHECK(out(0, 0) == 1.5);
  CHECK(out(0, 1) == 3.0);
  CHECK(out(1, 0) == doctest::Approx(1.0 / 1.5));
  CHECK(out(2, 0) == 7.0);

  const Matrix down = group_scale(Matrix{{1, 2}}, {0}, {1}, 2.0);
  CHECK(down(0, 0) == 0.5);
  CHECK(down(0, 1) == 1.0);
}

TEST_CASE("group_scale with empty masks is the identity") {
  const Matrix x = fstest::random_matrix(3, 2, 501);
  CHECK(group_scale(x, {0, 0, 0}, {0, 0, 0}, 1.5) == x);
}

TEST_CASE("overlapping scale masks are rejected") {
  CHECK_THROWS_AS(group_scale(Matrix(2, 2), {1, 0}, {1, 0}, 1.5), ConfigError);
}

TEST_CASE("augment with r=0 is a labeled no-op") {
  const auto g = fstest::path_graph(fstest::random_matrix(5, 3, 502));
  AugmentConfig config;
  config.selection_rate = 0.0;
  config.seed = 11;
  const auto result = augment(g, config);
  CHECK(result.x_prime == g.features());
  CHECK(result.y_prime == std::vector<std::uint8_t>(5, 0));
}

TEST_CASE("r=1 with an isolated node at p=0.9 scales the row down") {
  const WorkflowGraph g("solo", Matrix(1, 1), Matrix{{2.0, 4.0}}, {"a"});
  AugmentConfig config;
  config.selection_rate = 1.0;
  config.scale_factor = 1.5;
  const auto result = augment_with_draws(g, config, {0.9});
  CHECK(result.y_prime == std::vector<std::uint8_t>{1});
  CHECK(result.down_mask == std::vector<std::uint8_t>{1});
  CHECK(result.x_prime(0, 0) == doctest::Approx(2.0 / 1.5));
  CHECK(result.x_prime(0, 1) == doctest::Approx(4.0 / 1.5));
}

TEST_CASE("augment matches a straight-line oracle over the recorded draws") {
  const auto g = fstest::path_graph(fstest::random_matrix(5, 3, 503, 0.0, 1.0));
  for (const bool strict : {false, true}) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      AugmentConfig config;
      config.selection_rate = 0.8;
      config.scale_factor = 1.5;
      config.seed = seed;
      config.strict_mask_band = strict;
      const auto result = augment(g, config);
      const auto expected =
          oracle_augment(g, result.p, config.selection_rate, config.scale_factor, strict);
      CHECK(result.y_prime == expected.y_prime);
      CHECK(fstest::max_abs_diff(result.x_prime, expected.x_prime) == 0.0);
    }
  }
}

TEST_CASE("unlabeled nodes keep bitwise-identical rows") {
  const auto g = fstest::path_graph(fstest::random_matrix(40, 4, 504));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    AugmentConfig config;
    config.selection_rate = 0.6;
    config.seed = seed;
    const auto result = augment(g, config);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      if (result.y_prime[i]) continue;
      for (std::size_t j = 0; j < g.feature_dim(); ++j) {
        CHECK(result.x_prime(i, j) == g.features()(i, j));
      }
    }
  }
}

TEST_CASE("the three masks are disjoint subsets of the pseudo-positives") {
  const auto g = fstest::path_graph(fstest::random_matrix(60, 2, 505));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    AugmentConfig config;
    config.selection_rate = 0.7;
    config.seed = seed;
    const auto result = augment(g, config);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const int active = result.swap_mask[i] + result.up_mask[i] + result.down_mask[i];
      CHECK(active <= 1);
      if (active == 1) CHECK(result.y_prime[i] == 1);
      CHECK(result.y_prime[i] == (result.p[i] < config.selection_rate ? 1 : 0));
    }
  }
}

TEST_CASE("augment is deterministic in the seed") {
  const auto g = fstest::path_graph(fstest::random_matrix(8, 3, 506));
  AugmentConfig config;
  config.selection_rate = 0.5;
  config.seed = 77;
  const auto a = augment(g, config);
  const auto b = augment(g, config);
  CHECK(a.x_prime == b.x_prime);
  CHECK(a.y_prime == b.y_prime);
  CHECK(a.p == b.p);
}

TEST_CASE("augment config validation") {
  const auto g = fstest::path_graph(Matrix(2, 1));
  AugmentConfig config;
  config.selection_rate = 1.5;
  CHECK_THROWS_AS(augment(g, config), ConfigError);
  config.selection_rate = 0.5;
  config.scale_factor = 1.0;
  CHECK_THROWS_AS(augment(g, config), ConfigError);
}
