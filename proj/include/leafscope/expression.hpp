#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "leafscope/jet.hpp"
#include "leafscope/types.hpp"

namespace leafscope {

// Arithmetic expression over named variables, parsed once and evaluated many
// times. Grammar: numbers, variables, + - * / ^, unary minus, parentheses,
// and the functions sin cos tan exp log sqrt abs sinh cosh tanh atan acos.
// Constants `pi` and `e` are predefined.
class Expression {
 public:
  Expression() = default;

  // Throws ConfigError on syntax errors or unknown identifiers.
  Expression(const std::string& source, std::vector<std::string> variables);

  // Variables x1..xn, the convention used by scene configs.
  static Expression over_coordinates(const std::string& source, int n);

  double eval(std::span<const double> vars) const;
  Jet eval(std::span<const Jet> vars) const;
  cplx eval(std::span<const cplx> vars) const;

  const std::string& source() const { return source_; }
  bool empty() const { return !root_; }

  struct Node;

 private:
  std::string source_;
  std::vector<std::string> variables_;
  std::shared_ptr<const Node> root_;
};

}  // namespace leafscope
