#pragma once

#include <stdexcept>
#include <string>

namespace fewshot {

/// A problem the caller can fix: missing or malformed input files, unknown
/// class names, invalid configuration. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A non-finite loss or parameter was produced during optimization.
class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fewshot
