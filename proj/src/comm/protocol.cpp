#include "mrl/comm/protocol.hpp"

#include <cmath>

#include <json.hpp>

#include "mrl/errors.hpp"

namespace mrl::comm {

using nlohmann::json;
using PK = ProtocolError::Kind;

namespace {

void require(bool ok, PK kind, const std::string& what) {
  if (!ok) throw ProtocolError(kind, what);
}

const json& field(const json& j, const char* key, const char* kind) {
  if (!j.contains(key))
    throw ProtocolError(PK::MissingField,
                        std::string(kind) + ": missing field '" + key + "'");
  return j[key];
}

int get_int(const json& j, const char* key, const char* kind) {
  const json& f = field(j, key, kind);
  require(f.is_number_integer(), PK::MissingField,
          std::string(kind) + ": field '" + key + "' must be an integer");
  return f.get<int>();
}

int64_t get_i64(const json& j, const char* key, const char* kind) {
  const json& f = field(j, key, kind);
  require(f.is_number_integer(), PK::MissingField,
          std::string(kind) + ": field '" + key + "' must be an integer");
  return f.get<int64_t>();
}

double get_num(const json& j, const char* key, const char* kind) {
  const json& f = field(j, key, kind);
  require(f.is_number(), PK::MissingField,
          std::string(kind) + ": field '" + key + "' must be a number");
  return f.get<double>();
}

bool get_bool(const json& j, const char* key, const char* kind) {
  const json& f = field(j, key, kind);
  require(f.is_boolean(), PK::MissingField,
          std::string(kind) + ": field '" + key + "' must be a boolean");
  return f.get<bool>();
}

std::string get_str(const json& j, const char* key, const char* kind) {
  const json& f = field(j, key, kind);
  require(f.is_string(), PK::MissingField,
          std::string(kind) + ": field '" + key + "' must be a string");
  return f.get<std::string>();
}

std::vector<double> get_num_array(const json& j, const char* key, const char* kind,
                                  int exact = -1) {
  const json& f = field(j, key, kind);
  require(f.is_array(), PK::MissingField,
          std::string(kind) + ": field '" + key + "' must be an array");
  if (exact >= 0)
    require(static_cast<int>(f.size()) == exact, PK::MissingField,
            std::string(kind) + ": field '" + key + "' must have " +
                std::to_string(exact) + " entries");
  std::vector<double> out;
  out.reserve(f.size());
  for (const auto& e : f) {
    require(e.is_number(), PK::MissingField,
            std::string(kind) + ": field '" + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

json to_json(const WireMessage& msg) {
  json j;
  if (const auto* m = std::get_if<RegisterMsg>(&msg)) {
    j["kind"] = "REGISTER";
    j["robot_id"] = m->robot_id;
    j["namespace"] = m->ns;
  } else if (const auto* m = std::get_if<RegisterAckMsg>(&msg)) {
    j["kind"] = "REGISTER_ACK";
    j["robot_id"] = m->robot_id;
    j["cycle_ms"] = m->cycle_ms;
    j["substep_ms"] = m->substep_ms;
  } else if (const auto* m = std::get_if<CommandMsg>(&msg)) {
    j["kind"] = "COMMAND";
    j["robot_id"] = m->robot_id;
    j["cycle"] = m->cycle;
    j["v"] = m->v;
    j["w"] = m->w;
    j["exec_ms"] = m->exec_ms;
  } else if (const auto* m = std::get_if<StateMsg>(&msg)) {
    j["kind"] = "STATE";
    j["robot_id"] = m->robot_id;
    j["cycle"] = m->cycle;
    j["odom"] = {m->odom[0], m->odom[1]};
    j["lidar"] = m->lidar;
    j["collided"] = m->collided;
    j["in_goal"] = m->in_goal;
  } else if (const auto* m = std::get_if<ResetMsg>(&msg)) {
    j["kind"] = "RESET";
    j["episode"] = m->episode;
    j["pose"] = {m->pose[0], m->pose[1], m->pose[2]};
  } else if (const auto* m = std::get_if<ResetAckMsg>(&msg)) {
    j["kind"] = "RESET_ACK";
    j["robot_id"] = m->robot_id;
    j["episode"] = m->episode;
  } else {
    j["kind"] = "SHUTDOWN";
  }
  return j;
}

}  // namespace

std::string encode_message(const WireMessage& msg) {
  const std::string payload = to_json(msg).dump();
  if (payload.size() > kMaxFrameBytes)
    throw ProtocolError(PK::FrameTooLarge, "encode: payload exceeds 1 MiB");
  std::string frame;
  frame.reserve(4 + payload.size());
  const uint32_t len = static_cast<uint32_t>(payload.size());
  frame.push_back(static_cast<char>((len >> 24) & 0xff));
  frame.push_back(static_cast<char>((len >> 16) & 0xff));
  frame.push_back(static_cast<char>((len >> 8) & 0xff));
  frame.push_back(static_cast<char>(len & 0xff));
  frame += payload;
  return frame;
}

WireMessage decode_message(std::string_view frame) {
  require(frame.size() >= 4, PK::BadLength, "decode: frame shorter than the length header");
  const auto* b = reinterpret_cast<const unsigned char*>(frame.data());
  const uint32_t len = (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) |
                       (uint32_t(b[2]) << 8) | uint32_t(b[3]);
  require(len <= kMaxFrameBytes, PK::FrameTooLarge,
          "decode: declared length " + std::to_string(len) + " exceeds 1 MiB");
  require(frame.size() - 4 >= len, PK::TruncatedFrame,
          "decode: declared length " + std::to_string(len) + " but only " +
              std::to_string(frame.size() - 4) + " payload bytes");
  require(frame.size() - 4 == len, PK::BadLength, "decode: trailing bytes after frame");

  json j;
  try {
    j = json::parse(frame.substr(4));
  } catch (const json::parse_error& e) {
    throw ProtocolError(PK::BadJson, std::string("decode: ") + e.what());
  }
  require(j.is_object(), PK::BadJson, "decode: payload must be a JSON object");

  const std::string kind = get_str(j, "kind", "frame");
  if (kind == "REGISTER") {
    RegisterMsg m;
    m.robot_id = get_int(j, "robot_id", "REGISTER");
    m.ns = get_str(j, "namespace", "REGISTER");
    return m;
  }
  if (kind == "REGISTER_ACK") {
    RegisterAckMsg m;
    m.robot_id = get_int(j, "robot_id", "REGISTER_ACK");
    m.cycle_ms = get_int(j, "cycle_ms", "REGISTER_ACK");
    m.substep_ms = get_int(j, "substep_ms", "REGISTER_ACK");
    return m;
  }
  if (kind == "COMMAND") {
    CommandMsg m;
    m.robot_id = get_int(j, "robot_id", "COMMAND");
    m.cycle = get_i64(j, "cycle", "COMMAND");
    m.v = get_num(j, "v", "COMMAND");
    m.w = get_num(j, "w", "COMMAND");
    m.exec_ms = get_int(j, "exec_ms", "COMMAND");
    return m;
  }
  if (kind == "STATE") {
    StateMsg m;
    m.robot_id = get_int(j, "robot_id", "STATE");
    m.cycle = get_i64(j, "cycle", "STATE");
    auto odom = get_num_array(j, "odom", "STATE", 2);
    m.odom = {odom[0], odom[1]};
    m.lidar = get_num_array(j, "lidar", "STATE");
    m.collided = get_bool(j, "collided", "STATE");
    m.in_goal = get_bool(j, "in_goal", "STATE");
    return m;
  }
  if (kind == "RESET") {
    ResetMsg m;
    m.episode = get_i64(j, "episode", "RESET");
    auto pose = get_num_array(j, "pose", "RESET", 3);
    m.pose = {pose[0], pose[1], pose[2]};
    return m;
  }
  if (kind == "RESET_ACK") {
    ResetAckMsg m;
    m.robot_id = get_int(j, "robot_id", "RESET_ACK");
    m.episode = get_i64(j, "episode", "RESET_ACK");
    return m;
  }
  if (kind == "SHUTDOWN") return ShutdownMsg{};
  throw ProtocolError(PK::UnknownKind, "decode: unknown kind '" + kind + "'");
}

std::optional<std::string> FrameParser::next() {
  if (buf_.size() < 4) return std::nullopt;
  const auto* b = reinterpret_cast<const unsigned char*>(buf_.data());
  const uint32_t len = (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) |
                       (uint32_t(b[2]) << 8) | uint32_t(b[3]);
  require(len <= kMaxFrameBytes, PK::FrameTooLarge,
          "stream: declared length " + std::to_string(len) + " exceeds 1 MiB");
  if (buf_.size() < 4 + static_cast<size_t>(len)) return std::nullopt;
  std::string frame = buf_.substr(0, 4 + len);
  buf_.erase(0, 4 + len);
  return frame;
}

}  // namespace mrl::comm
