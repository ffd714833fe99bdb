#include "act/expression.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "act/errors.hpp"

namespace act {

struct Expression::Node {
  enum class Kind { Number, Time, Add, Sub, Mul, Div, Pow, Neg, Fn };
  // Function ids; Log only appears in derivative trees.
  enum class Fn { Sin, Cos, Tanh, Exp, Sinh, Cosh, Sqrt, Log };

  Kind kind;
  double number = 0.0;
  Fn fn = Fn::Sin;
  NodePtr a, b;
};

namespace {

using Node = Expression::Node;
using NodePtr = Expression::NodePtr;
using Kind = Node::Kind;
using Fn = Node::Fn;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->number = v;
  return n;
}

NodePtr fn_node(Fn f, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Fn;
  n->fn = f;
  n->a = std::move(arg);
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Kind::Number && n->number == v;
}

// Light simplification keeps derivative trees readable and cheap.
NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make(Kind::Add, a, b);
}
NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  return make(Kind::Sub, a, b);
}
NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return number(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return make(Kind::Mul, a, b);
}
NodePtr divide(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return number(0.0);
  if (is_const(b, 1.0)) return a;
  return make(Kind::Div, a, b);
}

double eval_node(const Node& n, double t) {
  switch (n.kind) {
    case Kind::Number: return n.number;
    case Kind::Time: return t;
    case Kind::Add: return eval_node(*n.a, t) + eval_node(*n.b, t);
    case Kind::Sub: return eval_node(*n.a, t) - eval_node(*n.b, t);
    case Kind::Mul: return eval_node(*n.a, t) * eval_node(*n.b, t);
    case Kind::Div: return eval_node(*n.a, t) / eval_node(*n.b, t);
    case Kind::Pow: return std::pow(eval_node(*n.a, t), eval_node(*n.b, t));
    case Kind::Neg: return -eval_node(*n.a, t);
    case Kind::Fn: {
      const double v = eval_node(*n.a, t);
      switch (n.fn) {
        case Fn::Sin: return std::sin(v);
        case Fn::Cos: return std::cos(v);
        case Fn::Tanh: return std::tanh(v);
        case Fn::Exp: return std::exp(v);
        case Fn::Sinh: return std::sinh(v);
        case Fn::Cosh: return std::cosh(v);
        case Fn::Sqrt: return std::sqrt(v);
        case Fn::Log: return std::log(v);
      }
    }
  }
  return 0.0;
}

NodePtr diff(const NodePtr& n);

NodePtr diff_fn(const Node& n) {
  const NodePtr da = diff(n.a);
  switch (n.fn) {
    case Fn::Sin: return mul(fn_node(Fn::Cos, n.a), da);
    case Fn::Cos: return make(Kind::Neg, mul(fn_node(Fn::Sin, n.a), da));
    case Fn::Tanh: {
      // 1 - tanh^2
      NodePtr th = fn_node(Fn::Tanh, n.a);
      return mul(sub(number(1.0), mul(th, th)), da);
    }
    case Fn::Exp: return mul(fn_node(Fn::Exp, n.a), da);
    case Fn::Sinh: return mul(fn_node(Fn::Cosh, n.a), da);
    case Fn::Cosh: return mul(fn_node(Fn::Sinh, n.a), da);
    case Fn::Sqrt:
      return divide(da, mul(number(2.0), fn_node(Fn::Sqrt, n.a)));
    case Fn::Log: return divide(da, n.a);
  }
  return number(0.0);
}

NodePtr diff(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Number: return number(0.0);
    case Kind::Time: return number(1.0);
    case Kind::Add: return add(diff(n->a), diff(n->b));
    case Kind::Sub: return sub(diff(n->a), diff(n->b));
    case Kind::Mul: return add(mul(diff(n->a), n->b), mul(n->a, diff(n->b)));
    case Kind::Div:
      return divide(sub(mul(diff(n->a), n->b), mul(n->a, diff(n->b))), mul(n->b, n->b));
    case Kind::Neg: return make(Kind::Neg, diff(n->a));
    case Kind::Pow: {
      if (n->b->kind == Kind::Number) {
        const double e = n->b->number;
        return mul(mul(number(e), make(Kind::Pow, n->a, number(e - 1.0))), diff(n->a));
      }
      // General rule f^g (g' log f + g f'/f).
      NodePtr term = add(mul(diff(n->b), fn_node(Fn::Log, n->a)),
                         divide(mul(n->b, diff(n->a)), n->a));
      return mul(make(Kind::Pow, n->a, n->b), term);
    }
    case Kind::Fn: return diff_fn(*n);
  }
  return number(0.0);
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw SyntaxError("unexpected trailing input", pos_);
    return e;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (eat('+'))
        lhs = make(Kind::Add, lhs, term());
      else if (eat('-'))
        lhs = make(Kind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (eat('*'))
        lhs = make(Kind::Mul, lhs, unary());
      else if (eat('/'))
        lhs = make(Kind::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Kind::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Kind::Pow, base, unary());  // right associative
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw SyntaxError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) throw SyntaxError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(s_.substr(start), &consumed);
    } catch (const std::exception&) {
      throw SyntaxError("malformed number", start);
    }
    pos_ = start + consumed;
    return number(v);
  }

  NodePtr parse_ident() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "t") return make(Kind::Time);
    if (name == "pi") return number(M_PI);
    if (name == "e") return number(M_E);

    static const std::pair<const char*, Fn> table[] = {
        {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"tanh", Fn::Tanh}, {"exp", Fn::Exp},
        {"sinh", Fn::Sinh}, {"cosh", Fn::Cosh}, {"sqrt", Fn::Sqrt}};
    for (const auto& [fname, id] : table) {
      if (name == fname) {
        if (!eat('(')) throw SyntaxError("expected '(' after function name", pos_);
        NodePtr arg = expr();
        if (!eat(')')) throw SyntaxError("expected ')'", pos_);
        return fn_node(id, arg);
      }
    }
    throw UnknownIdentifier("unknown identifier '" + name + "'");
  }
};

}  // namespace

double Expression::eval(double t) const {
  if (!root_) throw std::logic_error("Expression: empty");
  return eval_node(*root_, t);
}

Expression Expression::derivative() const {
  if (!root_) throw std::logic_error("Expression: empty");
  return from_root(diff(root_), "d/dt(" + source_ + ")");
}

Expression Expression::from_root(NodePtr root, std::string source) {
  Expression e;
  e.root_ = std::move(root);
  e.source_ = std::move(source);
  return e;
}

Expression parse_expression(const std::string& text) {
  if (text.size() > 4096) throw SyntaxError("expression too long", 4096);
  Parser parser(text);
  return Expression::from_root(parser.run(), text);
}

}  // namespace act
