#include "mrl/manager/convergence.hpp"

#include "mrl/errors.hpp"

namespace mrl::manager {

bool convergence_check(const std::vector<std::vector<char>>& history, int window,
                       double threshold) {
  if (window < 1) throw RangeError("convergence window must be >= 1");
  if (static_cast<int>(history.size()) < window) return false;
  const size_t n_robots = history.back().size();
  if (n_robots == 0) return false;

  for (size_t r = 0; r < n_robots; ++r) {
    int successes = 0;
    for (size_t t = history.size() - window; t < history.size(); ++t) {
      if (history[t].size() != n_robots)
        throw ArityError("convergence history has inconsistent robot counts");
      if (history[t][r]) ++successes;
    }
    if (static_cast<double>(successes) / window <= threshold) return false;
  }
  return true;
}

}  // namespace mrl::manager
