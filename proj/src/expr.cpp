#include "subfreq/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace subfreq {

struct Expression::Node {
  enum class Kind { constant, variable, unary, binary };
  Kind kind;
  double value = 0.0;       // constant
  std::size_t var = 0;      // variable index
  char op = 0;              // binary: + - * / ^
  double (*fn)(double) = nullptr; // unary function
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->value = v;
  return n;
}

NodePtr make_var(std::size_t j) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::variable;
  n->var = j;
  return n;
}

NodePtr make_unary(double (*fn)(double), NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::unary;
  n->fn = fn;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(char op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

double fn_abs(double x) { return std::abs(x); }
double fn_neg(double x) { return -x; }

struct Parser {
  const std::string& text;
  std::size_t pos = 0;
  std::size_t num_vars;

  explicit Parser(const std::string& t, std::size_t nv) : text(t), num_vars(nv) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression error at position " +
                                std::to_string(pos) + ": " + what + " in \"" +
                                text + "\"");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      if (eat('+')) {
        lhs = make_binary('+', lhs, parse_term());
      } else if (eat('-')) {
        lhs = make_binary('-', lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (true) {
      if (eat('*')) {
        lhs = make_binary('*', lhs, parse_unary());
      } else if (eat('/')) {
        lhs = make_binary('/', lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return make_unary(&fn_neg, parse_unary());
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (eat('^')) {
      // Right associative; exponent may itself be signed.
      return make_binary('^', base, parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    std::size_t end = pos;
    std::size_t parsed = 0;
    double v = 0.0;
    try {
      v = std::stod(text.substr(pos), &parsed);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    end = pos + parsed;
    pos = end;
    return make_const(v);
  }

  NodePtr parse_ident() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
    }
    const std::string name = text.substr(start, pos - start);

    if (name == "pi") return make_const(M_PI);
    if (name == "e") return make_const(M_E);

    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) {
        digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
      }
      if (digits) {
        const std::size_t j = std::stoul(name.substr(1));
        if (j < 1 || j > num_vars) fail("variable " + name + " out of range");
        return make_var(j - 1);
      }
    }

    static const struct {
      const char* name;
      double (*fn)(double);
    } kFunctions[] = {
        {"sin", [](double x) { return std::sin(x); }},
        {"cos", [](double x) { return std::cos(x); }},
        {"tan", [](double x) { return std::tan(x); }},
        {"asin", [](double x) { return std::asin(x); }},
        {"acos", [](double x) { return std::acos(x); }},
        {"atan", [](double x) { return std::atan(x); }},
        {"sinh", [](double x) { return std::sinh(x); }},
        {"cosh", [](double x) { return std::cosh(x); }},
        {"tanh", [](double x) { return std::tanh(x); }},
        {"exp", [](double x) { return std::exp(x); }},
        {"log", [](double x) { return std::log(x); }},
        {"sqrt", [](double x) { return std::sqrt(x); }},
        {"abs", &fn_abs},
    };
    for (const auto& f : kFunctions) {
      if (name == f.name) {
        if (!eat('(')) fail("expected '(' after " + name);
        NodePtr arg = parse_expr();
        if (!eat(')')) fail("missing ')' after " + name + " argument");
        return make_unary(f.fn, arg);
      }
    }
    fail("unknown identifier '" + name + "'");
  }
};

double eval_node(const Node& n, std::span<const double> vars) {
  switch (n.kind) {
    case Node::Kind::constant:
      return n.value;
    case Node::Kind::variable:
      return vars[n.var];
    case Node::Kind::unary:
      return n.fn(eval_node(*n.a, vars));
    case Node::Kind::binary: {
      const double a = eval_node(*n.a, vars);
      const double b = eval_node(*n.b, vars);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
      }
      return 0.0;
    }
  }
  return 0.0;
}

} // namespace

Expression Expression::parse(const std::string& text, std::size_t num_vars) {
  Parser parser(text, num_vars);
  NodePtr root = parser.parse_expr();
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("trailing input");
  return Expression(std::move(root), text);
}

double Expression::eval(std::span<const double> vars) const {
  return eval_node(*root_, vars);
}

} // namespace subfreq
