#include "mrl/algo/replay.hpp"

#include <cmath>

#include "mrl/errors.hpp"

namespace mrl::algo {

PrioritizedReplay::PrioritizedReplay(size_t capacity, double alpha, double eps_priority)
    : capacity_(capacity), alpha_(alpha), eps_priority_(eps_priority), tree_(capacity) {
  if (capacity == 0) throw RangeError("replay capacity must be positive");
  if (eps_priority <= 0.0) throw RangeError("replay priority epsilon must be positive");
  store_.resize(capacity);
}

double PrioritizedReplay::priority_from_td(double td_error) const {
  return std::pow(std::abs(td_error) + eps_priority_, alpha_);
}

size_t PrioritizedReplay::add(Transition t, double td_error) {
  const size_t slot = next_;
  store_[slot] = std::move(t);
  tree_.update(slot, priority_from_td(td_error));
  next_ = (next_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
  return slot;
}

const Transition& PrioritizedReplay::at(size_t index) const {
  if (index >= size_) throw RangeError("replay: index out of range");
  return store_[index];
}

void PrioritizedReplay::update_priority(size_t index, double td_error) {
  if (index >= size_) throw RangeError("replay: index out of range");
  tree_.update(index, priority_from_td(td_error));
}

std::optional<PrioritizedReplay::Batch> PrioritizedReplay::sample(size_t batch, double beta,
                                                                  Rng& rng) const {
  if (size_ < batch || batch == 0) return std::nullopt;
  const double total = tree_.total();
  Batch out;
  out.indices.reserve(batch);
  out.weights.reserve(batch);
  out.items.reserve(batch);

  const double segment = total / static_cast<double>(batch);
  double max_w = 0.0;
  for (size_t k = 0; k < batch; ++k) {
    double prefix = (static_cast<double>(k) + rng.uniform()) * segment;
    if (prefix >= total) prefix = std::nextafter(total, 0.0);
    const size_t idx = tree_.sample(prefix);
    const double p = tree_.priority(idx) / total;
    const double w = std::pow(static_cast<double>(size_) * p, -beta);
    out.indices.push_back(idx);
    out.weights.push_back(w);
    out.items.push_back(&store_[idx]);
    max_w = std::max(max_w, w);
  }
  for (double& w : out.weights) w /= max_w;
  return out;
}

}  // namespace mrl::algo
