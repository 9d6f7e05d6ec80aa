#include <benchmark/benchmark.h>

#include "flowsentry/matrix.hpp"
#include "flowsentry/rng.hpp"
#include "flowsentry/tape.hpp"

using namespace flowsentry;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = 2.0 * rng.uniform() - 1.0;
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1);
  const Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matmul(a, b));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n * n * n);
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128)->Arg(256);

void BM_TapeForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = random_matrix(n, 16, 3);
  const Matrix w1 = random_matrix(16, 32, 4);
  const Matrix w2 = random_matrix(32, 16, 5);
  for (auto _ : state) {
    Tape tape;
    const auto vw1 = tape.leaf(w1);
    const auto vw2 = tape.leaf(w2);
    const auto hidden = tape.relu(tape.matmul(tape.constant(x), vw1));
    const auto loss = tape.frobenius(tape.matmul(hidden, vw2));
    tape.backward(loss);
    benchmark::DoNotOptimize(tape.grad(vw1));
  }
}
BENCHMARK(BM_TapeForwardBackward)->Arg(140)->Arg(560);

}  // namespace

BENCHMARK_MAIN();
