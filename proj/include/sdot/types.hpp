#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sdot {

// Points live in the plane; one-dimensional problems use the first
// coordinate and keep the second at zero, so inner products and norms are
// the same expressions in both cases.
using Point = Eigen::Vector2d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Entropic quantities use logits kLogitScale * (<x, y_i> - z_i) / eps, the
// squared-distance cost convention under which the canonical two-atom
// instance has entropic map tanh(2x / eps).
inline constexpr double kLogitScale = 2.0;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or construction input. Carries every violated
// invariant, not just the first one.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdot
