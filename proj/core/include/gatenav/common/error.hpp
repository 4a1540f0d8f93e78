#pragma once

#include <stdexcept>
#include <string>

namespace gatenav {

// Error categories map onto the CLI exit codes: config=2, data=3, training=4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrainError : std::runtime_error {
  explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values or misuse of the tensor graph. Training loops catch this
// and rethrow as TrainError tagged with the epoch.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gatenav
