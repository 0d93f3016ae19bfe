#include "walsh/curve.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <variant>

namespace walsh {

namespace detail {

enum class Func { cos, sin, exp, abs };

struct Number {
  double value;
};
struct Variable {};
struct Pi {};
struct Negate {
  std::shared_ptr<const CurveNode> operand;
};
struct Binary {
  char op;
  std::shared_ptr<const CurveNode> lhs;
  std::shared_ptr<const CurveNode> rhs;
};
struct Call {
  Func func;
  std::shared_ptr<const CurveNode> arg;
};

struct CurveNode {
  std::variant<Number, Variable, Pi, Negate, Binary, Call> node;
};

}  // namespace detail

namespace {

using detail::Binary;
using detail::Call;
using detail::CurveNode;
using detail::Func;
using detail::Negate;
using detail::Number;
using detail::Pi;
using detail::Variable;
using NodePtr = std::shared_ptr<const CurveNode>;

template <typename T>
NodePtr make(T value) {
  return std::make_shared<const CurveNode>(CurveNode{std::move(value)});
}

constexpr std::array<std::pair<std::string_view, Func>, 4> kFunctions{{
    {"cos", Func::cos},
    {"sin", Func::sin},
    {"exp", Func::exp},
    {"abs", Func::abs},
}};

std::string_view func_name(Func f) {
  for (const auto& [name, func] : kFunctions) {
    if (func == f) return name;
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr root = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("expected operator or end of input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const {
    throw CurveSyntaxError("syntax error at offset " + std::to_string(pos_) + ": " + expected,
                           pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Binary{'+', lhs, term()});
      } else if (accept('-')) {
        lhs = make(Binary{'-', lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Binary{'*', lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Binary{'/', lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Negate{unary()});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Binary{'^', base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected number, identifier or '('");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expression();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("expected number, identifier or '('");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + text_.size(), value,
                        std::chars_format::general);
    if (ec != std::errc()) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return make(Number{value});
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "u") return make(Variable{});
    if (name == "pi") return make(Pi{});
    for (const auto& [fname, func] : kFunctions) {
      if (name == fname) {
        expect('(');
        NodePtr arg = expression();
        expect(')');
        return make(Call{func, arg});
      }
    }
    throw UnknownIdentifier(std::string(name), start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw CurveDomainError(std::string("non-finite result in ") + what);
  return v;
}

double eval_node(const CurveNode& n, double u) {
  struct Visitor {
    double u;
    double operator()(const Number& x) const { return x.value; }
    double operator()(const Variable&) const { return u; }
    double operator()(const Pi&) const { return std::numbers::pi; }
    double operator()(const Negate& x) const { return -eval_node(*x.operand, u); }
    double operator()(const Call& x) const {
      const double a = eval_node(*x.arg, u);
      switch (x.func) {
        case Func::cos:
          return std::cos(a);
        case Func::sin:
          return std::sin(a);
        case Func::exp:
          return checked(std::exp(a), "exp");
        case Func::abs:
          return std::abs(a);
      }
      return 0.0;
    }
    double operator()(const Binary& x) const {
      const double a = eval_node(*x.lhs, u);
      const double b = eval_node(*x.rhs, u);
      switch (x.op) {
        case '+':
          return a + b;
        case '-':
          return a - b;
        case '*':
          return a * b;
        case '/':
          if (b == 0.0) throw CurveDomainError("division by zero");
          return checked(a / b, "division");
        case '^': {
          if (b != std::nearbyint(b)) throw CurveDomainError("exponent must be an integer");
          if (a == 0.0 && b < 0.0) throw CurveDomainError("division by zero in power");
          return checked(std::pow(a, b), "power");
        }
      }
      return 0.0;
    }
  };
  return std::visit(Visitor{u}, n.node);
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string serialize(const CurveNode& n) {
  struct Visitor {
    std::string operator()(const Number& x) const { return format_number(x.value); }
    std::string operator()(const Variable&) const { return "u"; }
    std::string operator()(const Pi&) const { return "pi"; }
    std::string operator()(const Negate& x) const { return "(-" + serialize(*x.operand) + ")"; }
    std::string operator()(const Call& x) const {
      return std::string(func_name(x.func)) + "(" + serialize(*x.arg) + ")";
    }
    std::string operator()(const Binary& x) const {
      return "(" + serialize(*x.lhs) + x.op + serialize(*x.rhs) + ")";
    }
  };
  return std::visit(Visitor{}, n.node);
}

bool equal_nodes(const CurveNode& a, const CurveNode& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* x = std::get_if<Number>(&a.node)) return x->value == std::get<Number>(b.node).value;
  if (const auto* x = std::get_if<Negate>(&a.node)) {
    return equal_nodes(*x->operand, *std::get<Negate>(b.node).operand);
  }
  if (const auto* x = std::get_if<Binary>(&a.node)) {
    const auto& y = std::get<Binary>(b.node);
    return x->op == y.op && equal_nodes(*x->lhs, *y.lhs) && equal_nodes(*x->rhs, *y.rhs);
  }
  if (const auto* x = std::get_if<Call>(&a.node)) {
    const auto& y = std::get<Call>(b.node);
    return x->func == y.func && equal_nodes(*x->arg, *y.arg);
  }
  return true;  // Variable, Pi
}

bool references_u(const CurveNode& n) {
  if (std::holds_alternative<Variable>(n.node)) return true;
  if (const auto* x = std::get_if<Negate>(&n.node)) return references_u(*x->operand);
  if (const auto* x = std::get_if<Binary>(&n.node)) {
    return references_u(*x->lhs) || references_u(*x->rhs);
  }
  if (const auto* x = std::get_if<Call>(&n.node)) return references_u(*x->arg);
  return false;
}

}  // namespace

CurveExpr::CurveExpr() : root_(make(Number{0.0})) {}

CurveExpr CurveExpr::parse(std::string_view text) { return CurveExpr(Parser(text).parse()); }

CurveExpr CurveExpr::constant(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("curve constant must be finite");
  if (value < 0.0) return CurveExpr(make(Negate{make(Number{-value})}));
  return CurveExpr(make(Number{value}));
}

double CurveExpr::operator()(double u) const {
  return eval_node(*root_, std::clamp(u, 0.0, 1.0));
}

std::string CurveExpr::to_string() const { return serialize(*root_); }

bool CurveExpr::depends_on_u() const noexcept { return references_u(*root_); }

bool operator==(const CurveExpr& a, const CurveExpr& b) { return equal_nodes(*a.root_, *b.root_); }

}  // namespace walsh
