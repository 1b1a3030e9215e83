#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mrl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class InvalidActionError : public Error {
 public:
  using Error::Error;
};

class EpisodeFinishedError : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

// Config loading reports every problem it found, not just the first one.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "config invalid:";
    for (const auto& s : v) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> issues_;
};

class ProtocolError : public Error {
 public:
  enum class Kind {
    BadLength,
    TruncatedFrame,
    FrameTooLarge,
    BadJson,
    UnknownKind,
    MissingField,
  };
  ProtocolError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class CheckpointError : public Error {
 public:
  enum class Kind { BadMagic, BadVersion, Truncated, ArchMismatch, Io };
  CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class GatherTimeoutError : public Error {
 public:
  GatherTimeoutError(std::vector<int> missing, const std::string& what)
      : Error(what), missing_(std::move(missing)) {}
  const std::vector<int>& missing() const { return missing_; }

 private:
  std::vector<int> missing_;
};

}  // namespace mrl
