#pragma once

#include <cstdint>

namespace saddle {

// Work counters. One pass equals `data_size` scalar data accesses (nnz for a matrix).
class CostModel {
 public:
  explicit CostModel(std::uint64_t data_size) : data_size_(data_size == 0 ? 1 : data_size) {}

  void add_touches(double touches) { touches_ += touches; }
  void add_full_pass() { touches_ += static_cast<double>(data_size_); }
  void add_prox(double cost) {
    ++prox_calls_;
    prox_cost_ += cost;
  }

  double touches() const { return touches_; }
  double passes() const { return touches_ / static_cast<double>(data_size_); }
  std::uint64_t prox_calls() const { return prox_calls_; }
  double prox_cost() const { return prox_cost_; }
  std::uint64_t data_size() const { return data_size_; }

 private:
  std::uint64_t data_size_;
  double touches_ = 0.0;
  std::uint64_t prox_calls_ = 0;
  double prox_cost_ = 0.0;
};

}  // namespace saddle
