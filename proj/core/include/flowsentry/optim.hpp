#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flowsentry/matrix.hpp"

namespace flowsentry {

/// Named trainable matrices plus per-parameter Adam moments and a shared,
/// monotone step counter.
class ParameterStore {
 public:
  void insert(const std::string& name, Matrix value);
  bool contains(const std::string& name) const;

  Matrix& value(const std::string& name);
  const Matrix& value(const std::string& name) const;
  Matrix& first_moment(const std::string& name);
  const Matrix& first_moment(const std::string& name) const;
  Matrix& second_moment(const std::string& name);
  const Matrix& second_moment(const std::string& name) const;

  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }

  std::uint64_t step_count() const { return step_count_; }
  void set_step_count(std::uint64_t steps) { step_count_ = steps; }
  void increment_step() { ++step_count_; }

  friend bool operator==(const ParameterStore&, const ParameterStore&) = default;

 private:
  struct Entry {
    Matrix value;
    Matrix first_moment;
    Matrix second_moment;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;

  std::map<std::string, Entry> entries_;
  std::uint64_t step_count_ = 0;
};

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One Adam update with bias correction. Weight decay couples into the
/// gradient as classic L2: g += weight_decay * theta. Increments the shared
/// step count exactly once.
void adam_step(ParameterStore& params, const std::map<std::string, Matrix>& grads,
               double learning_rate, double weight_decay, const AdamSettings& settings = {});

}  // namespace flowsentry
