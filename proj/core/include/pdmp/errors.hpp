#ifndef PDMP_ERRORS_HPP
#define PDMP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdmp {

// Base class for all library errors; the CLI maps these to exit code 2,
// validation failures to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error("syntax error at position " + std::to_string(position) + ": " + message),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown identifier or out-of-range variable: " + name) {}
};

class NonIntegerExponent : public Error {
 public:
  explicit NonIntegerExponent(const std::string& detail)
      : Error("expected constant integer exponent: " + detail) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what) : Error(what) {}
};

class SingularJacobian : public Error {
 public:
  explicit SingularJacobian(const std::string& what) : Error(what) {}
};

class FamilyExplosion : public Error {
 public:
  explicit FamilyExplosion(const std::string& what) : Error(what) {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& what) : Error(what) {}
};

class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& what) : Error(what) {}
};

class ResolutionTooCoarse : public Error {
 public:
  explicit ResolutionTooCoarse(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace pdmp

#endif  // PDMP_ERRORS_HPP
