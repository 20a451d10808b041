#ifndef BNPR_COMMON_HPP
#define BNPR_COMMON_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace bnpr {

using Vector = Eigen::VectorXd;
using Array = Eigen::ArrayXd;
using Index = Eigen::Index;

// Input that violates a documented precondition (bad arguments, malformed data).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure at runtime (non-convergence, singular system).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Newick syntax error, carries the character offset of the problem.
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : InvalidInput(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace bnpr

#endif  // BNPR_COMMON_HPP
