#pragma once

#include <string>
#include <vector>

namespace mrl::manager {

struct RegistryEntry {
  int robot_id = -1;
  std::string ns;
  int endpoint_handle = -1;  // transport slot in deploy mode
  bool registered = false;
};

// Namespaces are unique, ids dense 0..n-1 and stable for the life of a run.
class RobotRegistry {
 public:
  int register_robot(const std::string& ns, int endpoint_handle = -1);
  size_t size() const { return entries_.size(); }
  const RegistryEntry& entry(int robot_id) const;
  const std::vector<RegistryEntry>& entries() const { return entries_; }
  int id_for(const std::string& ns) const;  // NotFoundError if absent

 private:
  std::vector<RegistryEntry> entries_;
};

}  // namespace mrl::manager
