#include <cmath>

#include "doctest.h"
#include "flowsentry/error.hpp"
#include "flowsentry/optim.hpp"
#include "test_util.hpp"

using namespace flowsentry;

namespace {

ParameterStore two_param_store() {
  ParameterStore store;
  store.insert("w", fstest::random_matrix(2, 3, 31));
  store.insert("b", fstest::random_matrix(1, 3, 32));
  return store;
}

}  // namespace

TEST_CASE("zero gradient and zero weight decay leave parameters unchanged") {
  ParameterStore store = two_param_store();
  const ParameterStore before = store;
  adam_step(store, {{"w", Matrix(2, 3)}, {"b", Matrix(1, 3)}}, 1e-3, 0.0);
  CHECK(store.value("w") == before.value("w"));
  CHECK(store.value("b") == before.value("b"));
  CHECK(store.step_count() == 1);
}

TEST_CASE("first step matches a scripted Adam oracle") {
  const double lr = 1e-3;
  const double wd = 1e-4;
  const AdamSettings settings;
  ParameterStore store = two_param_store();
  const Matrix theta0 = store.value("w");
  const Matrix grad = fstest::random_matrix(2, 3, 33);

  adam_step(store, {{"w", grad}}, lr, wd, settings);

  // Straight-line single-step Adam with coupled L2, written independently.
  for (std::size_t i = 0; i < theta0.size(); ++i) {
    const double g = grad.data()[i] + wd * theta0.data()[i];
    const double m = (1.0 - settings.beta1) * g;
    const double v = (1.0 - settings.beta2) * g * g;
    const double m_hat = m / (1.0 - settings.beta1);
    const double v_hat = v / (1.0 - settings.beta2);
    const double expected = theta0.data()[i] - lr * m_hat / (std::sqrt(v_hat) + settings.epsilon);
    CHECK(store.value("w").data()[i] == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("two-step sequence matches a scripted Adam oracle") {
  const double lr = 0.01;
  const AdamSettings settings;
  ParameterStore store;
  store.insert("w", Matrix{{0.5, -0.25}});
  const Matrix g1{{0.3, -0.1}};
  const Matrix g2{{-0.2, 0.4}};

  adam_step(store, {{"w", g1}}, lr, 0.0, settings);
  adam_step(store, {{"w", g2}}, lr, 0.0, settings);
  CHECK(store.step_count() == 2);

  double theta[2] = {0.5, -0.25};
  double m[2] = {0, 0};
  double v[2] = {0, 0};
  const double grads[2][2] = {{0.3, -0.1}, {-0.2, 0.4}};
  for (int t = 1; t <= 2; ++t) {
    for (int i = 0; i < 2; ++i) {
      const double g = grads[t - 1][i];
      m[i] = settings.beta1 * m[i] + (1 - settings.beta1) * g;
      v[i] = settings.beta2 * v[i] + (1 - settings.beta2) * g * g;
      const double m_hat = m[i] / (1 - std::pow(settings.beta1, t));
      const double v_hat = v[i] / (1 - std::pow(settings.beta2, t));
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + settings.epsilon);
    }
  }
  CHECK(store.value("w")(0, 0) == doctest::Approx(theta[0]).epsilon(1e-14));
  CHECK(store.value("w")(0, 1) == doctest::Approx(theta[1]).epsilon(1e-14));
}

TEST_CASE("identical calls on identical inputs give identical states") {
  ParameterStore a = two_param_store();
  ParameterStore b = two_param_store();
  const Matrix grad_w = fstest::random_matrix(2, 3, 34);
  const Matrix grad_b = fstest::random_matrix(1, 3, 35);
  adam_step(a, {{"w", grad_w}, {"b", grad_b}}, 1e-3, 1e-4);
  adam_step(b, {{"w", grad_w}, {"b", grad_b}}, 1e-3, 1e-4);
  CHECK(a == b);
}

TEST_CASE("shape mismatch between gradient and parameter is rejected") {
  ParameterStore store = two_param_store();
  CHECK_THROWS_AS(adam_step(store, {{"w", Matrix(3, 2)}}, 1e-3, 0.0), ShapeError);
}

TEST_CASE("unknown parameter name is rejected") {
  ParameterStore store = two_param_store();
  CHECK_THROWS_AS(adam_step(store, {{"nope", Matrix(1, 1)}}, 1e-3, 0.0), BoundsError);
}
