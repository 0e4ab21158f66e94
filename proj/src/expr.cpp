#include "varexp/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

#include "varexp/errors.hpp"

namespace varexp {

struct Expr::Node {
  enum class Kind { Const, VarX, VarY, Unary, Binary };
  Kind kind = Kind::Const;
  double value = 0.0;
  char op = 0;  // for Binary: + - * / ^
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double x, double y) const {
    switch (kind) {
      case Kind::Const: return value;
      case Kind::VarX: return x;
      case Kind::VarY: return y;
      case Kind::Unary: return fn(lhs->eval(x, y));
      case Kind::Binary: {
        const double a = lhs->eval(x, y);
        const double b = rhs->eval(x, y);
        switch (op) {
          case '+': return a + b;
          case '-': return a - b;
          case '*': return a * b;
          case '/': return a / b;
          default: return std::pow(a, b);
        }
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct Parser {
  const std::string& s;
  size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("expression \"" + s + "\": " + what + " at offset " +
                     std::to_string(pos));
  }

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool consume(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) { ++pos; return true; }
    return false;
  }

  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }

  NodePtr make_const(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Kind::Const;
    n->value = v;
    return n;
  }

  NodePtr make_binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Kind::Binary;
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (consume('+')) lhs = make_binary('+', lhs, parse_product());
      else if (consume('-')) lhs = make_binary('-', lhs, parse_product());
      else return lhs;
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (consume('*')) lhs = make_binary('*', lhs, parse_unary());
      else if (consume('/')) lhs = make_binary('/', lhs, parse_unary());
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    if (consume('-')) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Kind::Binary;
      n->op = '-';
      n->lhs = make_const(0.0);
      n->rhs = parse_unary();
      return n;
    }
    consume('+');
    return parse_power();
  }

  // right-associative
  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (consume('^')) return make_binary('^', base, parse_unary());
    return base;
  }

  NodePtr parse_atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v;
      try {
        v = std::stod(s.substr(pos), &used);
      } catch (const std::exception&) {
        fail("bad numeric literal");
      }
      pos += used;
      return make_const(v);
    }
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_sum();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      const std::string name = s.substr(start, pos - start);
      if (name == "x" || name == "y") {
        auto n = std::make_shared<Expr::Node>();
        n->kind = name == "x" ? Expr::Node::Kind::VarX : Expr::Node::Kind::VarY;
        return n;
      }
      if (name == "pi") return make_const(3.14159265358979323846);
      static const struct { const char* name; double (*fn)(double); } fns[] = {
          {"sin", std::sin},  {"cos", std::cos},   {"tan", std::tan},
          {"exp", std::exp},  {"log", std::log},   {"sqrt", std::sqrt},
          {"abs", std::fabs}, {"tanh", std::tanh},
      };
      for (const auto& f : fns) {
        if (name == f.name) {
          if (!consume('(')) fail("expected '(' after function name");
          NodePtr arg = parse_sum();
          if (!consume(')')) fail("expected ')'");
          auto n = std::make_shared<Expr::Node>();
          n->kind = Expr::Node::Kind::Unary;
          n->fn = f.fn;
          n->lhs = std::move(arg);
          return n;
        }
      }
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser p(text);
  NodePtr root = p.parse_sum();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return Expr(std::move(root), text);
}

double Expr::eval(double x, double y) const { return root_->eval(x, y); }

Expr::Expr(std::shared_ptr<const Node> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}
Expr::Expr(const Expr&) = default;
Expr& Expr::operator=(const Expr&) = default;
Expr::Expr(Expr&&) noexcept = default;
Expr& Expr::operator=(Expr&&) noexcept = default;
Expr::~Expr() = default;

}  // namespace varexp
