#pragma once

#include <stdexcept>
#include <string>

namespace mtp {

// Base of every error thrown by the library. `condition()` names the
// violated requirement in a short machine-friendly form.
class Error : public std::runtime_error {
 public:
  Error(std::string condition, const std::string& what)
      : std::runtime_error(condition + ": " + what), condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

class PreconditionViolated : public Error {
 public:
  explicit PreconditionViolated(const std::string& what) : Error("precondition", what) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what) : Error("configuration", what) {}
};

// A search under an index budget did not find what the construction needs.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(const std::string& unmet, const std::string& what)
      : Error("budget-exhausted", unmet + ": " + what) {}
};

// Space left in a ball after removing enlarged earlier sub-levels is too small.
class FreeRegionDeficit : public Error {
 public:
  explicit FreeRegionDeficit(const std::string& what) : Error("free-region-deficit", what) {}
};

// Two quantities could not be ordered within the enclosure precision cap.
class UndecidedComparison : public Error {
 public:
  explicit UndecidedComparison(const std::string& what) : Error("undecided-comparison", what) {}
};

}  // namespace mtp
