#pragma once

// Coefficient-curve expressions such as "-1.8*cos(1.5-cos(4*pi*u))".
//
// Grammar (whitespace-insensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'u' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := 'cos' | 'sin' | 'exp' | 'abs'

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "walsh/errors.hpp"

namespace walsh {

class CurveSyntaxError : public Error {
 public:
  CurveSyntaxError(const std::string& what, std::size_t offset) : Error(what), offset_(offset) {}
  /// Byte offset into the source text.
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public CurveSyntaxError {
 public:
  UnknownIdentifier(const std::string& name, std::size_t offset)
      : CurveSyntaxError("unknown identifier '" + name + "' at offset " + std::to_string(offset),
                         offset),
        name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Evaluation left the real domain (division by zero, non-integer exponent, overflow).
class CurveDomainError : public Error {
 public:
  using Error::Error;
};

namespace detail {
struct CurveNode;
}

/// Immutable parsed curve a(u). Copies share the tree.
class CurveExpr {
 public:
  /// The constant 0.
  CurveExpr();

  static CurveExpr parse(std::string_view text);
  static CurveExpr constant(double value);

  /// Value at u clamped to [0,1]: a(u) = a(0) for u < 0 and a(1) for u > 1.
  double operator()(double u) const;

  /// Parenthesized text that parses back to a structurally equal tree.
  std::string to_string() const;

  /// False when the expression never references `u`.
  bool depends_on_u() const noexcept;

  /// Structural equality of the syntax trees.
  friend bool operator==(const CurveExpr& a, const CurveExpr& b);

 private:
  explicit CurveExpr(std::shared_ptr<const detail::CurveNode> root) : root_(std::move(root)) {}
  std::shared_ptr<const detail::CurveNode> root_;
};

inline CurveExpr parse_curve(std::string_view text) { return CurveExpr::parse(text); }
inline double eval_curve(const CurveExpr& expr, double u) { return expr(u); }

}  // namespace walsh
