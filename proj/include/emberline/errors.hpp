#pragma once

#include <stdexcept>
#include <string>

namespace emberline {

/// Base of every error the library throws on a contract violation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownFuelError : public Error {
 public:
  explicit UnknownFuelError(int id)
      : Error("unknown fuel id " + std::to_string(id)), id_(id) {}
  [[nodiscard]] int id() const noexcept { return id_; }

 private:
  int id_;
};

/// Grid file that does not follow the EMBERGRID layout.
class MalformedGridError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// A rollout that never quiesced within the configured step cap.
class StepCapExceeded : public Error {
 public:
  using Error::Error;
};

class EpisodeError : public Error {
 public:
  using Error::Error;
};

/// Configuration problem; carries the dotted key path it concerns.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& message)
      : Error(key_path.empty() ? message : key_path + ": " + message), key_path_(std::move(key_path)) {}
  [[nodiscard]] const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace emberline
