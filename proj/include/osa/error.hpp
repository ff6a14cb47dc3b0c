#ifndef OSA_ERROR_HPP
#define OSA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace osa {

/// Invalid model or experiment configuration (bad breakpoints, unknown labels,
/// incomplete rule base, non-positive rates, ...).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Config text that cannot be parsed. Carries a 1-based line and column.
class SyntaxError : public ConfigError {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Violated precondition on a pure computation (empty candidate list, zero
/// available spectrum, undefined average, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace osa

#endif  // OSA_ERROR_HPP
