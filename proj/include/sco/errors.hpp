#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sco {

/// Raised while assembling an objective: unsupported operation, shape
/// mismatch, or an expression that mixes parameter vectors.
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an objective is evaluated outside its domain (log of a
/// nonpositive value, division by zero, overflow). Carries the offending
/// tape node.
class EvaluationError : public std::domain_error {
 public:
  EvaluationError(std::size_t node, std::string op, const std::string& what)
      : std::domain_error("node " + std::to_string(node) + " (" + op + "): " + what),
        node_(node),
        op_(std::move(op)) {}

  std::size_t node() const noexcept { return node_; }
  const std::string& op() const noexcept { return op_; }

 private:
  std::size_t node_;
  std::string op_;
};

}  // namespace sco
