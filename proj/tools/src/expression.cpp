#include "potmap/cli/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>

namespace potmap::cli {

namespace {

using Kind = Node::Kind;

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = v;
  return n;
}

NodePtr make_var(Variable v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = v;
  return n;
}

NodePtr make_node(Kind k, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_call(Func f, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = f;
  n->a = std::move(a);
  return n;
}

bool is_num(const NodePtr& n, double v) { return n->kind == Kind::Number && n->value == v; }
bool is_num(const NodePtr& n) { return n->kind == Kind::Number; }

// Constructors with the folding rules used by differentiation.
NodePtr add(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  if (is_num(a) && is_num(b)) return make_number(a->value + b->value);
  return make_node(Kind::Add, a, b);
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_num(b, 0.0)) return a;
  if (is_num(a) && is_num(b)) return make_number(a->value - b->value);
  if (is_num(a, 0.0)) return make_node(Kind::Neg, b);
  return make_node(Kind::Sub, a, b);
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0) || is_num(b, 0.0)) return make_number(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  if (is_num(a) && is_num(b)) return make_number(a->value * b->value);
  return make_node(Kind::Mul, a, b);
}

NodePtr divide(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return make_number(0.0);
  if (is_num(b, 1.0)) return a;
  return make_node(Kind::Div, a, b);
}

NodePtr neg(NodePtr a) {
  if (is_num(a)) return make_number(-a->value);
  return make_node(Kind::Neg, a);
}

double apply(Func f, double v) {
  switch (f) {
    case Func::Sin: return std::sin(v);
    case Func::Cos: return std::cos(v);
    case Func::Tan: return std::tan(v);
    case Func::Exp: return std::exp(v);
    case Func::Log: return std::log(v);
    case Func::Sqrt: return std::sqrt(v);
    case Func::Abs: return std::abs(v);
  }
  return 0.0;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
  }
  return "?";
}

std::optional<Func> lookup_func(std::string_view name) {
  static const std::pair<const char*, Func> table[] = {{"sin", Func::Sin},   {"cos", Func::Cos}, {"tan", Func::Tan},
                                                      {"exp", Func::Exp},   {"log", Func::Log}, {"sqrt", Func::Sqrt},
                                                      {"abs", Func::Abs}};
  for (const auto& [n, f] : table)
    if (name == n) return f;
  return std::nullopt;
}

double eval(const Node& n, const Vector& t, const Vector& x) {
  switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::Var: {
      const Vector& src = n.var.kind == VarKind::T ? t : x;
      if (n.var.index >= src.size())
        throw Error(ErrorCode::OutOfDomain, "expression variable outside the supplied point");
      return src(n.var.index);
    }
    case Kind::Neg: return -eval(*n.a, t, x);
    case Kind::Add: return eval(*n.a, t, x) + eval(*n.b, t, x);
    case Kind::Sub: return eval(*n.a, t, x) - eval(*n.b, t, x);
    case Kind::Mul: return eval(*n.a, t, x) * eval(*n.b, t, x);
    case Kind::Div: return eval(*n.a, t, x) / eval(*n.b, t, x);
    case Kind::Pow: return std::pow(eval(*n.a, t, x), eval(*n.b, t, x));
    case Kind::Call: return apply(n.func, eval(*n.a, t, x));
  }
  return 0.0;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", std::abs(v));
  return v < 0 ? std::string("(-") + buf + ")" : std::string(buf);
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Number: out += format_number(n.value); return;
    case Kind::Var:
      out += n.var.kind == VarKind::T ? 't' : 'x';
      out += std::to_string(n.var.index + 1);
      return;
    case Kind::Neg:
      out += "(-";
      print_node(*n.a, out);
      out += ")";
      return;
    case Kind::Call:
      out += func_name(n.func);
      out += "(";
      print_node(*n.a, out);
      out += ")";
      return;
    default: break;
  }
  const char op = n.kind == Kind::Add ? '+' : n.kind == Kind::Sub ? '-' : n.kind == Kind::Mul ? '*' : n.kind == Kind::Div ? '/' : '^';
  out += "(";
  print_node(*n.a, out);
  out += ' ';
  out += op;
  out += ' ';
  print_node(*n.b, out);
  out += ")";
}

bool depends(const Node& n, const Variable& v) {
  switch (n.kind) {
    case Kind::Number: return false;
    case Kind::Var: return n.var == v;
    case Kind::Neg:
    case Kind::Call: return depends(*n.a, v);
    default: return depends(*n.a, v) || depends(*n.b, v);
  }
}

void collect(const Node& n, std::set<Variable>& vars) {
  if (n.kind == Kind::Var) vars.insert(n.var);
  if (n.a) collect(*n.a, vars);
  if (n.b) collect(*n.b, vars);
}

NodePtr diff(const NodePtr& n, const Variable& v) {
  if (!depends(*n, v)) return make_number(0.0);
  const NodePtr& a = n->a;
  const NodePtr& b = n->b;
  switch (n->kind) {
    case Kind::Number: return make_number(0.0);
    case Kind::Var: return make_number(1.0);
    case Kind::Neg: return neg(diff(a, v));
    case Kind::Add: return add(diff(a, v), diff(b, v));
    case Kind::Sub: return sub(diff(a, v), diff(b, v));
    case Kind::Mul: return add(mul(diff(a, v), b), mul(a, diff(b, v)));
    case Kind::Div: return divide(sub(mul(diff(a, v), b), mul(a, diff(b, v))), mul(b, b));
    case Kind::Pow:
      if (!depends(*b, v)) {
        const NodePtr lowered = is_num(b) ? make_number(b->value - 1.0) : sub(b, make_number(1.0));
        return mul(mul(b, make_node(Kind::Pow, a, lowered)), diff(a, v));
      }
      return mul(n, add(mul(diff(b, v), make_call(Func::Log, a)), divide(mul(b, diff(a, v)), a)));
    case Kind::Call: {
      const NodePtr da = diff(a, v);
      switch (n->func) {
        case Func::Sin: return mul(make_call(Func::Cos, a), da);
        case Func::Cos: return neg(mul(make_call(Func::Sin, a), da));
        case Func::Tan: return divide(da, make_node(Kind::Pow, make_call(Func::Cos, a), make_number(2.0)));
        case Func::Exp: return mul(n, da);
        case Func::Log: return divide(da, a);
        case Func::Sqrt: return divide(da, mul(make_number(2.0), n));
        case Func::Abs: return mul(divide(a, n), da);
      }
    }
  }
  return make_number(0.0);
}

bool equal(const NodePtr& x, const NodePtr& y) {
  if (x == y) return true;
  if (!x || !y || x->kind != y->kind) return false;
  switch (x->kind) {
    case Kind::Number: return x->value == y->value;
    case Kind::Var: return x->var == y->var;
    case Kind::Call: return x->func == y->func && equal(x->a, y->a);
    case Kind::Neg: return equal(x->a, y->a);
    default: return equal(x->a, y->a) && equal(x->b, y->b);
  }
}

// Lexer and recursive-descent parser.

enum class Tok { Number, Ident, LParen, RParen, Plus, Minus, Star, Slash, Caret, End, Bad };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double value = 0.0;
  int line = 1;
  int column = 1;
};

class Parser {
 public:
  Parser(std::string_view src, VariableLimits limits) : src_(src), limits_(limits) { advance(); }

  NodePtr parse() {
    NodePtr e = expr();
    if (tok_.kind != Tok::End) fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    return e;
  }

 private:
  std::string_view src_;
  VariableLimits limits_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;

  char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(peek()))) bump();
    tok_ = Token{};
    tok_.line = line_;
    tok_.column = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    const char c = peek();
    const std::size_t start = pos_;
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      while (std::isdigit(static_cast<unsigned char>(peek()))) bump();
      if (peek() == '.') {
        bump();
        while (std::isdigit(static_cast<unsigned char>(peek()))) bump();
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (std::isdigit(static_cast<unsigned char>(peek(1))) ||
           ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
        bump();
        if (peek() == '+' || peek() == '-') bump();
        while (std::isdigit(static_cast<unsigned char>(peek()))) bump();
      }
      tok_.kind = Tok::Number;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      tok_.value = std::strtod(tok_.text.c_str(), nullptr);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') bump();
      tok_.kind = Tok::Ident;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    bump();
    tok_.text = std::string(1, c);
    switch (c) {
      case '(': tok_.kind = Tok::LParen; break;
      case ')': tok_.kind = Tok::RParen; break;
      case '+': tok_.kind = Tok::Plus; break;
      case '-': tok_.kind = Tok::Minus; break;
      case '*': tok_.kind = Tok::Star; break;
      case '/': tok_.kind = Tok::Slash; break;
      case '^': tok_.kind = Tok::Caret; break;
      default: tok_.kind = Tok::Bad; break;
    }
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const std::string found = tok_.kind == Tok::End ? "end of input" : "'" + tok_.text + "'";
    throw ParseFailure(tok_.line, tok_.column, std::move(expected), found);
  }

  NodePtr expr() {
    NodePtr left = term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const Kind k = tok_.kind == Tok::Plus ? Kind::Add : Kind::Sub;
      advance();
      left = make_node(k, left, term());
    }
    return left;
  }

  NodePtr term() {
    NodePtr left = unary();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const Kind k = tok_.kind == Tok::Star ? Kind::Mul : Kind::Div;
      advance();
      left = make_node(k, left, unary());
    }
    return left;
  }

  NodePtr unary() {
    if (tok_.kind == Tok::Minus) {
      advance();
      return make_node(Kind::Neg, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (tok_.kind == Tok::Caret) {
      advance();
      return make_node(Kind::Pow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    switch (tok_.kind) {
      case Tok::Number: {
        NodePtr n = make_number(tok_.value);
        advance();
        return n;
      }
      case Tok::LParen: {
        advance();
        NodePtr e = expr();
        if (tok_.kind != Tok::RParen) fail({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"});
        advance();
        return e;
      }
      case Tok::Ident: return identifier();
      default: fail({"number", "variable", "function", "'('", "'-'"});
    }
  }

  NodePtr identifier() {
    const std::string name = tok_.text;
    if (auto f = lookup_func(name)) {
      advance();
      if (tok_.kind != Tok::LParen) fail({"'('"});
      advance();
      NodePtr arg = expr();
      if (tok_.kind != Tok::RParen) fail({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"});
      advance();
      return make_call(*f, arg);
    }
    if ((name[0] == 't' || name[0] == 'x') && name.size() >= 2 && name[1] != '0') {
      bool digits = true;
      for (std::size_t k = 1; k < name.size(); ++k) digits = digits && std::isdigit(static_cast<unsigned char>(name[k]));
      if (digits && name.size() <= 6) {
        const int index = std::atoi(name.c_str() + 1);
        const VarKind kind = name[0] == 't' ? VarKind::T : VarKind::X;
        const std::optional<int>& limit = kind == VarKind::T ? limits_.p : limits_.n;
        if (!limit || index <= *limit) {
          advance();
          return make_var(Variable{kind, index - 1});
        }
      }
    }
    std::vector<std::string> expected{"function"};
    expected.push_back(limits_.p ? (*limits_.p > 0 ? "t1..t" + std::to_string(*limits_.p) : "no t variable") : "t<k>");
    expected.push_back(limits_.n ? (*limits_.n > 0 ? "x1..x" + std::to_string(*limits_.n) : "no x variable") : "x<k>");
    fail(expected);
  }
};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? ", " : "") + items[k];
  return out;
}

}  // namespace

Expression::Expression() : root_(make_number(0.0)) {}
Expression::Expression(NodePtr root) : root_(std::move(root)) {}

Expression Expression::number(double v) { return Expression(make_number(v)); }
Expression Expression::variable(Variable v) { return Expression(make_var(v)); }

double Expression::evaluate(const Vector& t, const Vector& x) const { return eval(*root_, t, x); }

std::string Expression::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

Expression Expression::derivative(Variable v) const { return Expression(diff(root_, v)); }

bool Expression::depends_on(Variable v) const { return depends(*root_, v); }

std::vector<Variable> Expression::variables() const {
  std::set<Variable> vars;
  collect(*root_, vars);
  return {vars.begin(), vars.end()};
}

bool Expression::is_constant() const { return variables().empty(); }

bool Expression::operator==(const Expression& o) const { return equal(root_, o.root_); }

ParseFailure::ParseFailure(int line, int column, std::vector<std::string> expected, const std::string& found)
    : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                       ": expected one of {" + join(expected) + "}, found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

Expression parse_expression(std::string_view src, VariableLimits limits) {
  return Expression(Parser(src, limits).parse());
}

}  // namespace potmap::cli
