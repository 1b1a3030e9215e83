#pragma once

#include <vector>

namespace mrl::manager {

// history[t][r] is robot r's success in episode t. True iff over the trailing
// `window` episodes every robot's individual success rate strictly exceeds
// `threshold`. A history shorter than the window is simply not converged.
bool convergence_check(const std::vector<std::vector<char>>& history, int window = 20,
                       double threshold = 0.8);

}  // namespace mrl::manager
