#pragma once

#include <stdexcept>
#include <string>

namespace cgm {

// Every error thrown by the library carries a stable machine-readable code.
// The CLI maps these onto process exit statuses.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct RangeError : Error {
  explicit RangeError(const std::string& w) : Error("range", w) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error("domain", w) {}
};

struct InvalidParameters : Error {
  explicit InvalidParameters(const std::string& w) : Error("invalid_parameters", w) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& w) : Error("numerical", w) {}
};

struct ResourceError : Error {
  explicit ResourceError(const std::string& w) : Error("resource", w) {}
};

struct DivergenceError : Error {
  explicit DivergenceError(const std::string& w) : Error("divergence", w) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error("validation", w) {}
};

struct DataError : Error {
  explicit DataError(const std::string& w) : Error("data", w) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error("config", w) {}
};

struct InsufficientExtent : Error {
  explicit InsufficientExtent(const std::string& w) : Error("insufficient_extent", w) {}
};

}  // namespace cgm
