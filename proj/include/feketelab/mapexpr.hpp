#pragma once

#include <memory>
#include <string>

#include "feketelab/exactq.hpp"
#include "feketelab/ratmap.hpp"

namespace feketelab {

/// Syntax tree for rational-map expressions over z: complex decimal literals
/// ("1.5", "i", "2e-3"), +, -, *, /, ^ with integer exponents, parentheses.
/// Literal decimals become exact Gaussian rationals, so maps written this way
/// carry exact coefficients all the way into the resultant.
struct MapExpression {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg };
  Kind kind = Kind::Var;
  GaussQ constant;                      // Kind::Const
  long exponent = 0;                    // Kind::Pow
  std::shared_ptr<MapExpression> lhs, rhs;

  std::string pretty_print() const;
  bool same_tree(const MapExpression& o) const;
};

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

/// Recursive-descent parse with the usual precedence (^ above unary minus
/// above * / above + -, ^ right-associative). Round-trips: parsing the
/// pretty-printed form yields an identical tree.
std::shared_ptr<MapExpression> parse_map_expression(const std::string& text);

/// Evaluates the tree in Q(i)(z), gcd-reduces, homogenizes to degree
/// d = max(deg num, deg den) and builds the exact lift. Rejects degree < 2,
/// degree > 24 and degenerate maps.
HomLift expression_to_lift(const MapExpression& expr);

HomLift parse_map(const std::string& text);

}  // namespace feketelab
