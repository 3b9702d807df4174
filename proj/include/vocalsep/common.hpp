#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace vocalsep {

// Time-frequency matrices are stored frame-major: row = frame t, column = bin.
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Raised when an operation receives input that violates its preconditions.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace vocalsep
