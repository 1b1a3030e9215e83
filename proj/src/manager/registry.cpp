#include "mrl/manager/registry.hpp"

#include "mrl/errors.hpp"

namespace mrl::manager {

int RobotRegistry::register_robot(const std::string& ns, int endpoint_handle) {
  if (ns.empty()) throw ConflictError("namespace must be non-empty");
  for (const auto& e : entries_)
    if (e.ns == ns) throw ConflictError("namespace '" + ns + "' already registered");
  RegistryEntry e;
  e.robot_id = static_cast<int>(entries_.size());
  e.ns = ns;
  e.endpoint_handle = endpoint_handle;
  e.registered = true;
  entries_.push_back(std::move(e));
  return entries_.back().robot_id;
}

const RegistryEntry& RobotRegistry::entry(int robot_id) const {
  if (robot_id < 0 || robot_id >= static_cast<int>(entries_.size()))
    throw NotFoundError("registry: unknown robot id " + std::to_string(robot_id));
  return entries_[robot_id];
}

int RobotRegistry::id_for(const std::string& ns) const {
  for (const auto& e : entries_)
    if (e.ns == ns) return e.robot_id;
  throw NotFoundError("registry: unknown namespace '" + ns + "'");
}

}  // namespace mrl::manager
