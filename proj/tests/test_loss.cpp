#include <cmath>

#include "doctest.h"
#include "flowsentry/decoder.hpp"
#include "flowsentry/error.hpp"
#include "flowsentry/loss.hpp"
#include "flowsentry/optim.hpp"
#include "test_util.hpp"

using namespace flowsentry;

TEST_CASE("decode with zero parameters reconstructs zeros") {
  ParameterStore params;
  Rng rng(0);
  init_decoder_parameters(params, 2, 4, 3, rng);
  for (const auto& name : params.names()) {
    params.value(name) = Matrix(params.value(name).rows(), params.value(name).cols());
  }
  CHECK(decode(fstest::random_matrix(5, 2, 1000), params) == Matrix(5, 3));
}

TEST_CASE("identity-contrived decoder weights pass non-negative z through") {
  // k = d = 2, hidden = 3: W1 embeds z into the first two hidden units,
  // W2 projects them back out.
  ParameterStore params;
  params.insert("decoder.hidden.weight", Matrix{{1, 0, 0}, {0, 1, 0}});
  params.insert("decoder.hidden.bias", Matrix(1, 3));
  params.insert("decoder.output.weight", Matrix{{1, 0}, {0, 1}, {0, 0}});
  params.insert("decoder.output.bias", Matrix(1, 2));
  const Matrix z = fstest::random_matrix(4, 2, 1001, 0.0, 2.0);
  CHECK(decode(z, params) == z);
}

TEST_CASE("decode forward matches a scripted two-layer oracle") {
  ParameterStore params;
  Rng rng(3);
  init_decoder_parameters(params, 3, 4, 2, rng);
  const Matrix z = fstest::random_matrix(5, 3, 1002);
  const Matrix out = decode(z, params);

  const Matrix& w1 = params.value("decoder.hidden.weight");
  const Matrix& b1 = params.value("decoder.hidden.bias");
  const Matrix& w2 = params.value("decoder.output.weight");
  const Matrix& b2 = params.value("decoder.output.bias");
  for (std::size_t i = 0; i < z.rows(); ++i) {
    std::vector<double> hidden(w1.cols());
    for (std::size_t h = 0; h < w1.cols(); ++h) {
      double acc = b1(0, h);
      for (std::size_t j = 0; j < z.cols(); ++j) acc += z(i, j) * w1(j, h);
      hidden[h] = std::max(0.0, acc);
    }
    for (std::size_t o = 0; o < w2.cols(); ++o) {
      double acc = b2(0, o);
      for (std::size_t h = 0; h < w1.cols(); ++h) acc += hidden[h] * w2(h, o);
      CHECK(std::abs(out(i, o) - acc) < 1e-12);
    }
  }
}

TEST_CASE("reconstruction loss of a perfect reconstruction is zero") {
  const Matrix x = fstest::random_matrix(3, 4, 1003);
  CHECK(reconstruction_loss(x, x) == 0.0);
}

TEST_CASE("reconstruction loss of the 3-4-5 difference is 5") {
  CHECK(reconstruction_loss(Matrix{{3, 4}}, Matrix{{0, 0}}) == doctest::Approx(5.0));
}

TEST_CASE("reconstruction loss matches sqrt-of-sum-of-squares") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Matrix a = fstest::random_matrix(4, 3, 1100 + seed);
    const Matrix b = fstest::random_matrix(4, 3, 1200 + seed);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      sum += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    }
    CHECK(std::abs(reconstruction_loss(a, b) - std::sqrt(sum)) < 1e-12);
  }
}

TEST_CASE("margin hinge cases") {
  // perturbed node at zero distance: hinge = lambda
  CHECK(margin_loss(Matrix{{0.0}}, Matrix{{0.0}}, {1}, 0.5) == doctest::Approx(0.5));
  // perturbed node far enough apart: hinge = 0
  CHECK(margin_loss(Matrix{{2.0}}, Matrix{{0.0}}, {1}, 0.5) == 0.0);
  // unperturbed node at distance 1: pulled together, d + lambda
  CHECK(margin_loss(Matrix{{1.0}}, Matrix{{0.0}}, {0}, 0.5) == doctest::Approx(1.5));
}

TEST_CASE("margin loss averages the per-node hinges") {
  const Matrix z{{0, 0}, {3, 4}};
  const Matrix z_prime{{0, 0}, {0, 0}};
  // node 0: y'=1, d=0 -> 1.0; node 1: y'=0, d=5 -> 6.0
  CHECK(margin_loss(z, z_prime, {1, 0}, 1.0) == doctest::Approx(3.5));
}

TEST_CASE("total loss interpolates between its two terms") {
  const Matrix x_hat{{2.0}};
  const Matrix x{{0.0}};  // reconstruction term = 2
  const Matrix z{{3.5}};
  const Matrix z_prime{{0.0}};  // unperturbed, lambda 0.5 -> margin term = 4
  const std::vector<std::uint8_t> y{0};

  CHECK(total_loss(x_hat, x, z, z_prime, y, {1.0, 0.5}) == doctest::Approx(2.0));
  CHECK(total_loss(x_hat, x, z, z_prime, y, {0.0, 0.5}) == doctest::Approx(4.0));
  CHECK(total_loss(x_hat, x, z, z_prime, y, {0.5, 0.5}) == doctest::Approx(3.0));
}

TEST_CASE("total loss is non-negative, zero only at the exact optimum") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const Matrix x_hat = fstest::random_matrix(3, 2, 1300 + seed);
    const Matrix x = fstest::random_matrix(3, 2, 1400 + seed);
    const Matrix z = fstest::random_matrix(3, 2, 1500 + seed);
    const Matrix z_prime = fstest::random_matrix(3, 2, 1600 + seed);
    CHECK(total_loss(x_hat, x, z, z_prime, {1, 0, 1}, {}) >= 0.0);
  }
  // exact optimum: perfect reconstruction, every hinge satisfied
  const Matrix x{{1.0}};
  const Matrix z{{5.0}};
  const Matrix z_prime{{0.0}};
  CHECK(total_loss(x, x, z, z_prime, {1}, {0.5, 1.0}) == 0.0);
}

TEST_CASE("anomaly scores: zero at perfect reconstruction and satisfied margin") {
  const Matrix x = fstest::random_matrix(2, 3, 1700);
  const Matrix z{{9.0}, {8.0}};
  const Matrix z_prime{{0.0}, {0.0}};
  const auto scores = anomaly_scores(x, x, z, z_prime, {1, 1}, {0.5, 1.0});
  CHECK(scores[0] == 0.0);
  CHECK(scores[1] == 0.0);
}

TEST_CASE("anomaly scores reduce to per-row reconstruction error at eta=1") {
  const Matrix x_hat{{1, 2}, {4, 6}};
  const Matrix x{{1, 2}, {1, 2}};
  const auto scores =
      anomaly_scores(x_hat, x, Matrix(2, 2), Matrix(2, 2), {0, 0}, {1.0, 1.0});
  CHECK(scores[0] == 0.0);
  CHECK(scores[1] == doctest::Approx(5.0));
}

TEST_CASE("anomaly scores match a scripted elementwise oracle") {
  const LossConfig config{0.4, 0.8};
  const Matrix x_hat = fstest::random_matrix(4, 3, 1800);
  const Matrix x = fstest::random_matrix(4, 3, 1801);
  const Matrix z = fstest::random_matrix(4, 2, 1802);
  const Matrix z_prime = fstest::random_matrix(4, 2, 1803);
  const std::vector<std::uint8_t> y{1, 0, 1, 0};

  const auto scores = anomaly_scores(x_hat, x, z, z_prime, y, config);
  for (std::size_t i = 0; i < 4; ++i) {
    double recon = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      recon += (x_hat(i, j) - x(i, j)) * (x_hat(i, j) - x(i, j));
    }
    double dist = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      dist += (z(i, j) - z_prime(i, j)) * (z(i, j) - z_prime(i, j));
    }
    const double s = y[i] ? 1.0 : -1.0;
    const double expected = config.eta * std::sqrt(recon) +
                            (1.0 - config.eta) * std::max(0.0, -s * std::sqrt(dist) + config.margin);
    CHECK(std::abs(scores[i] - expected) < 1e-12);
  }
}

TEST_CASE("mean of per-node hinge terms equals the margin loss exactly") {
  const Matrix z = fstest::random_matrix(6, 3, 1900);
  const Matrix z_prime = fstest::random_matrix(6, 3, 1901);
  const std::vector<std::uint8_t> y{1, 0, 0, 1, 1, 0};
  const double lambda = 0.7;
  // eta = 0 leaves exactly the hinge in each score
  const auto hinges = anomaly_scores(Matrix(6, 2), Matrix(6, 2), z, z_prime, y, {0.0, lambda});
  double mean = 0.0;
  for (const double h : hinges) mean += h;
  mean /= 6.0;
  CHECK(mean == doctest::Approx(margin_loss(z, z_prime, y, lambda)).epsilon(1e-15));
}

TEST_CASE("decide thresholds normalized scores") {
  const auto report = decide({0.0, 10.0}, {0.5, true});
  CHECK(report.normalized_scores == std::vector<double>{0.0, 1.0});
  CHECK(report.decisions == std::vector<std::uint8_t>{0, 1});
}

TEST_CASE("all-equal scores yield no detections and identity ranking") {
  const auto report = decide({4.2, 4.2, 4.2}, {0.5, true});
  CHECK(report.decisions == std::vector<std::uint8_t>{0, 0, 0});
  CHECK(report.ranking == std::vector<int>{0, 1, 2});
  CHECK(report.normalized_scores == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("ranking sorts by descending score with index tie-break") {
  const auto report = decide({3.0, 1.0, 2.0}, {0.5, true});
  CHECK(report.ranking == std::vector<int>{0, 2, 1});
  const auto tied = decide({1.0, 2.0, 2.0}, {0.5, true});
  CHECK(tied.ranking == std::vector<int>{1, 2, 0});
}

TEST_CASE("ranking is invariant under strictly increasing affine maps") {
  const std::vector<double> scores{0.3, 1.7, 0.3, 2.4, -0.9, 1.1};
  const auto base = decide(scores, {0.5, true});
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{2.0, 1.0}, {0.1, -3.0}}) {
    std::vector<double> mapped(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) mapped[i] = a * scores[i] + b;
    const auto report = decide(mapped, {0.5, true});
    CHECK(report.ranking == base.ranking);
    CHECK(report.decisions == base.decisions);  // min-max undoes the affine map
  }
  // normalization changes decisions, never the ranking
  const auto raw = decide(scores, {0.5, false});
  CHECK(raw.ranking == base.ranking);
}

TEST_CASE("raising a node's score never lowers its rank") {
  std::vector<double> scores{0.5, 0.9, 0.1, 0.7};
  const auto before = decide(scores, {0.5, true});
  const auto position = [](const std::vector<int>& ranking, int node) {
    return static_cast<int>(std::find(ranking.begin(), ranking.end(), node) - ranking.begin());
  };
  const int node = 2;
  for (double bump = 0.2; bump < 1.2; bump += 0.2) {
    auto raised = scores;
    raised[node] += bump;
    const auto after = decide(raised, {0.5, true});
    CHECK(position(after.ranking, node) <= position(before.ranking, node));
  }
}

TEST_CASE("loss and score validation") {
  CHECK_THROWS_AS(total_loss(Matrix(1, 1), Matrix(1, 1), Matrix(1, 1), Matrix(1, 1), {0},
                             LossConfig{1.5, 1.0}),
                  ConfigError);
  CHECK_THROWS_AS(margin_loss(Matrix(2, 2), Matrix(2, 2), {0}, 1.0), ShapeError);
  CHECK_THROWS_AS(anomaly_scores(Matrix(2, 2), Matrix(2, 3), Matrix(2, 2), Matrix(2, 2), {0, 0},
                                 {}),
                  ShapeError);
  CHECK_THROWS_AS(decide({}, {}), ShapeError);
  CHECK_THROWS_AS(decide({1.0}, {1.5, true}), ConfigError);
}
