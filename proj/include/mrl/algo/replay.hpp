#pragma once

#include <optional>
#include <vector>

#include "mrl/algo/sumtree.hpp"
#include "mrl/rng.hpp"

namespace mrl::algo {

struct Transition {
  int agent_id = 0;
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool done = false;
};

// Priority-proportional transition store: priority = (|td| + eps)^alpha,
// ring-buffer overwrite at capacity, stratified sampling with importance
// weights (N * P(i))^-beta normalized by the batch maximum.
class PrioritizedReplay {
 public:
  PrioritizedReplay(size_t capacity, double alpha, double eps_priority);

  size_t size() const { return size_; }
  size_t capacity() const { return capacity_; }

  // Returns the slot index the transition was stored in.
  size_t add(Transition t, double td_error);

  struct Batch {
    std::vector<size_t> indices;
    std::vector<double> weights;
    std::vector<const Transition*> items;
  };

  // Not-ready (nullopt) when fewer than `batch` transitions are stored.
  std::optional<Batch> sample(size_t batch, double beta, Rng& rng) const;

  void update_priority(size_t index, double td_error);
  double priority(size_t index) const { return tree_.priority(index); }
  const Transition& at(size_t index) const;
  double priority_from_td(double td_error) const;

 private:
  size_t capacity_;
  double alpha_;
  double eps_priority_;
  std::vector<Transition> store_;
  SumTree tree_;
  size_t next_ = 0;
  size_t size_ = 0;
};

}  // namespace mrl::algo
