#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ettbicc {

// Invalid configuration. Carries one message per offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  explicit ConfigError(const std::string& problem) : ConfigError(std::vector<std::string>{problem}) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Collects field problems and throws them together.
class FieldChecker {
 public:
  void require(bool ok, const std::string& problem) {
    if (!ok) problems_.push_back(problem);
  }
  void throw_if_any() const {
    if (!problems_.empty()) throw ConfigError(problems_);
  }

 private:
  std::vector<std::string> problems_;
};

}  // namespace ettbicc
