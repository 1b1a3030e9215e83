#include "mrl/bench/backend.hpp"
