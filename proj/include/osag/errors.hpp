#pragma once

#include <stdexcept>
#include <string>

namespace osag {

// Error categories; the CLI maps them to distinct process exit codes.
enum class ErrorKind {
  Config,  // bad configuration value or parameter
  Input,   // malformed caller input (unknown ids, empty datasets, bad edges)
  State,   // operation invoked before its preconditions were established
  Shape,   // dimension mismatch between vectors/matrices
  Bounds,  // index out of range
  Io,      // filesystem or ingestion failure
  Data,    // non-finite or otherwise unusable numeric data
  Check,   // an empirically verified bound failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& m) { return {ErrorKind::Config, m}; }
inline Error input_error(const std::string& m) { return {ErrorKind::Input, m}; }
inline Error state_error(const std::string& m) { return {ErrorKind::State, m}; }
inline Error shape_error(const std::string& m) { return {ErrorKind::Shape, m}; }
inline Error bounds_error(const std::string& m) { return {ErrorKind::Bounds, m}; }
inline Error io_error(const std::string& m) { return {ErrorKind::Io, m}; }
inline Error data_error(const std::string& m) { return {ErrorKind::Data, m}; }
inline Error check_error(const std::string& m) { return {ErrorKind::Check, m}; }

}  // namespace osag
