#pragma once

#include <stdexcept>
#include <string>

namespace solarfc {

// Error categories map 1:1 onto the C API status codes and the CLI exit
// codes (missing input -> 2, validation -> 3, numerical -> 4).
enum class ErrorKind {
  Format,        // malformed input file
  Config,        // invalid configuration or argument combination
  Data,          // inconsistent data (duplicates, empty dataset, ...)
  Numeric,       // divergence / non-finite values
  MissingInput,  // referenced file or directory does not exist
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error format_error(std::string msg) { return Error(ErrorKind::Format, std::move(msg)); }
inline Error config_error(std::string msg) { return Error(ErrorKind::Config, std::move(msg)); }
inline Error data_error(std::string msg) { return Error(ErrorKind::Data, std::move(msg)); }
inline Error numeric_error(std::string msg) { return Error(ErrorKind::Numeric, std::move(msg)); }
inline Error missing_input_error(std::string msg) {
  return Error(ErrorKind::MissingInput, std::move(msg));
}

}  // namespace solarfc
