#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mrl::comm {

inline constexpr size_t kMaxFrameBytes = 1 << 20;  // 1 MiB payload cap

struct RegisterMsg {
  int robot_id = -1;
  std::string ns;
  bool operator==(const RegisterMsg&) const = default;
};

struct RegisterAckMsg {
  int robot_id = -1;
  int cycle_ms = 0;
  int substep_ms = 0;
  bool operator==(const RegisterAckMsg&) const = default;
};

struct CommandMsg {
  int robot_id = -1;
  int64_t cycle = 0;
  double v = 0.0;
  double w = 0.0;
  int exec_ms = 0;
  bool operator==(const CommandMsg&) const = default;
};

struct StateMsg {
  int robot_id = -1;
  int64_t cycle = 0;
  std::array<double, 2> odom{0.0, 0.0};
  std::vector<double> lidar;
  bool collided = false;
  bool in_goal = false;
  bool operator==(const StateMsg&) const = default;
};

struct ResetMsg {
  int64_t episode = 0;
  std::array<double, 3> pose{0.0, 0.0, 0.0};
  bool operator==(const ResetMsg&) const = default;
};

struct ResetAckMsg {
  int robot_id = -1;
  int64_t episode = 0;
  bool operator==(const ResetAckMsg&) const = default;
};

struct ShutdownMsg {
  bool operator==(const ShutdownMsg&) const = default;
};

using WireMessage = std::variant<RegisterMsg, RegisterAckMsg, CommandMsg, StateMsg,
                                 ResetMsg, ResetAckMsg, ShutdownMsg>;

// Frame: 4-byte big-endian payload length, then UTF-8 JSON. Payload floats
// must be finite.
std::string encode_message(const WireMessage& msg);

// Decodes one complete frame; validates length, UTF-8/JSON, kind and the
// required fields for that kind. Throws ProtocolError with a distinct kind
// per failure.
WireMessage decode_message(std::string_view frame);

// Incremental reassembly for byte streams.
class FrameParser {
 public:
  void feed(const char* data, size_t len) { buf_.append(data, len); }
  void feed(std::string_view data) { buf_.append(data); }

  // Returns the next complete frame (header included), or nullopt if more
  // bytes are needed. Throws ProtocolError::FrameTooLarge early.
  std::optional<std::string> next();

  size_t buffered() const { return buf_.size(); }

 private:
  std::string buf_;
};

}  // namespace mrl::comm
