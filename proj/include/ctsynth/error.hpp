#pragma once

#include <stdexcept>
#include <string>

namespace ctsynth {

/// Bad input: malformed tables, invalid parameters, violated preconditions.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A conditional metric whose conditioning set is empty (e.g. tau3 at a k
/// with no original cells). Low-level metric functions return an empty
/// std::optional instead; orchestration code raises this. Exit code 3.
class UndefinedMetricError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

}  // namespace ctsynth
