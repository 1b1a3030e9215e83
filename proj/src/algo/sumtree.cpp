#include "mrl/algo/sumtree.hpp"

#include <cmath>

#include "mrl/errors.hpp"

namespace mrl::algo {

SumTree::SumTree(size_t capacity) {
  if (capacity == 0) throw RangeError("sumtree capacity must be positive");
  cap_ = 1;
  while (cap_ < capacity) cap_ <<= 1;
  nodes_.assign(2 * cap_, 0.0);
}

double SumTree::priority(size_t leaf) const {
  if (leaf >= cap_) throw RangeError("sumtree: leaf index out of range");
  return nodes_[cap_ + leaf];
}

void SumTree::update(size_t leaf, double priority) {
  if (leaf >= cap_) throw RangeError("sumtree: leaf index out of range");
  if (!(priority >= 0.0) || !std::isfinite(priority))
    throw RangeError("sumtree: priority must be finite and >= 0");
  size_t i = cap_ + leaf;
  nodes_[i] = priority;
  for (i >>= 1; i >= 1; i >>= 1) nodes_[i] = nodes_[2 * i] + nodes_[2 * i + 1];
}

size_t SumTree::sample(double prefix) const {
  if (!(prefix >= 0.0) || prefix >= total())
    throw RangeError("sumtree: prefix must lie in [0, total)");
  size_t i = 1;
  while (i < cap_) {
    const double left = nodes_[2 * i];
    if (prefix < left) {
      i = 2 * i;
    } else {
      prefix -= left;
      i = 2 * i + 1;
    }
  }
  return i - cap_;
}

}  // namespace mrl::algo
