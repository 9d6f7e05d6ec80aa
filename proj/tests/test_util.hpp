#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "flowsentry/graph.hpp"
#include "flowsentry/matrix.hpp"

namespace fstest {

inline flowsentry::Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned seed,
                                        double lo = -1.0, double hi = 1.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  flowsentry::Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = dist(gen);
  return m;
}

inline double max_abs_diff(const flowsentry::Matrix& a, const flowsentry::Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

/// Path graph 0-1-2-...-(n-1) with the given feature matrix.
inline flowsentry::WorkflowGraph path_graph(const flowsentry::Matrix& features,
                                            const std::string& id = "path") {
  const std::size_t n = features.rows();
  flowsentry::Matrix adjacency(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    adjacency(i, i + 1) = 1.0;
    adjacency(i + 1, i) = 1.0;
  }
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
  return flowsentry::WorkflowGraph(id, adjacency, features, ids);
}

/// Unique scratch directory under the system temp dir; caller cleans up.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("flowsentry_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fstest
