// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <string>

#include "cma/grid.hpp"

namespace cma {

/// Periodic scalar expression over the torus coordinates x1, y1, x2, y2.
///
/// Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary ('*' unary)*
///   unary   := ('+' | '-') unary | primary
///   primary := number | "pi" | func '(' expr ')' | '(' expr ')'
///   func    := "sin" | "cos" | "exp"
///
/// Coordinates may only appear inside sin/cos, whose argument must be
/// 2 pi * (integer combination of coordinates) plus a constant, so every
/// accepted expression is smooth and periodic on the unit torus.
class Expression {
 public:
  /// Throws FormatError with the offending position on bad input.
  static Expression parse(const std::string& text);

  /// coords holds x1, y1[, x2, y2].
  double evaluate(std::span<const double> coords) const;
  /// Number of real axes referenced (0, 2 or 4 after rounding up to pairs).
  int required_axes() const { return required_axes_; }
  const std::string& text() const { return text_; }

  /// Samples on every grid point. Throws InvalidArgument if the expression
  /// uses coordinates the grid does not have.
  PeriodicScalarField sample(const Grid& grid) const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  int required_axes_ = 0;
  std::string text_;
};

}  // namespace cma
