#pragma once

#include <cstddef>
#include <vector>

namespace mrl::algo {

// Binary tree of partial priority sums over a power-of-two leaf array.
// update() is O(log n); sample() maps a prefix value in [0, total) to the
// unique leaf whose cumulative interval contains it.
class SumTree {
 public:
  explicit SumTree(size_t capacity);

  size_t capacity() const { return cap_; }
  double total() const { return nodes_[1]; }
  double priority(size_t leaf) const;

  void update(size_t leaf, double priority);
  size_t sample(double prefix) const;

 private:
  size_t cap_ = 0;
  std::vector<double> nodes_;  // 1-based heap layout, leaves at [cap_, 2*cap_)
};

}  // namespace mrl::algo
