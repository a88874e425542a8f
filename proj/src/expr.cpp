#include "robdoa/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace robdoa {

namespace {

struct Token {
  enum class Kind { number, ident, op, lparen, rparen, end };
  Kind kind;
  std::size_t pos;
  double number = 0.0;
  char op = 0;
  std::string ident;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    current_.pos = pos_;
    if (pos_ >= src_.size()) {
      current_.kind = Token::Kind::end;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      current_.kind = Token::Kind::ident;
      current_.ident.assign(src_.substr(start, pos_ - start));
      return;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        current_.kind = Token::Kind::op;
        current_.op = c;
        ++pos_;
        return;
      case '(':
        current_.kind = Token::Kind::lparen;
        ++pos_;
        return;
      case ')':
        current_.kind = Token::Kind::rparen;
        ++pos_;
        return;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
  }

  void lex_number() {
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", pos_);
    current_.kind = Token::Kind::number;
    current_.number = v;
    pos_ += static_cast<std::size_t>(end - begin);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token current_;
};

}  // namespace

class ExpressionParser {
 public:
  ExpressionParser(std::string_view src, int n, int m)
      : lex_(src), expr_() {
    expr_.state_dim_ = n;
    expr_.input_dim_ = m;
    expr_.source_.assign(src);
  }

  Expression run() {
    expr_.root_ = parse_expression();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::end)
      throw ParseError("unexpected trailing input", t.pos);
    return std::move(expr_);
  }

 private:
  using Op = Expression::Op;

  int add_node(Expression::Node n) {
    expr_.nodes_.push_back(n);
    return static_cast<int>(expr_.nodes_.size()) - 1;
  }

  int parse_expression() {
    int lhs = parse_term();
    while (lex_.peek().kind == Token::Kind::op &&
           (lex_.peek().op == '+' || lex_.peek().op == '-')) {
      const char op = lex_.take().op;
      int rhs = parse_term();
      lhs = add_node({op == '+' ? Op::add : Op::sub, 0.0, 0, lhs, rhs});
    }
    return lhs;
  }

  int parse_term() {
    int lhs = parse_unary();
    while (lex_.peek().kind == Token::Kind::op &&
           (lex_.peek().op == '*' || lex_.peek().op == '/')) {
      const char op = lex_.take().op;
      int rhs = parse_unary();
      lhs = add_node({op == '*' ? Op::mul : Op::div, 0.0, 0, lhs, rhs});
    }
    return lhs;
  }

  int parse_unary() {
    if (lex_.peek().kind == Token::Kind::op && lex_.peek().op == '-') {
      lex_.take();
      int operand = parse_unary();
      return add_node({Op::neg, 0.0, 0, operand, -1});
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (lex_.peek().kind == Token::Kind::op && lex_.peek().op == '^') {
      lex_.take();
      int exponent = parse_unary();  // right-associative, allows 2^-3
      return add_node({Op::pow, 0.0, 0, base, exponent});
    }
    return base;
  }

  int parse_primary() {
    const Token t = lex_.take();
    switch (t.kind) {
      case Token::Kind::number:
        return add_node({Op::constant, t.number, 0, -1, -1});
      case Token::Kind::lparen: {
        int inner = parse_expression();
        const Token close = lex_.take();
        if (close.kind != Token::Kind::rparen)
          throw ParseError("expected ')'", close.pos);
        return inner;
      }
      case Token::Kind::ident:
        return parse_ident(t);
      case Token::Kind::end:
        throw ParseError("unexpected end of input", t.pos);
      default:
        throw ParseError("expected operand", t.pos);
    }
  }

  int parse_ident(const Token& t) {
    const std::string& name = t.ident;
    if ((name[0] == 'x' || name[0] == 'u') && name.size() > 1 &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i])))
          throw ParseError("unknown identifier '" + name + "'", t.pos);
      const long idx = std::strtol(name.c_str() + 1, nullptr, 10);
      const bool is_state = name[0] == 'x';
      const long limit = is_state ? expr_.state_dim_ : expr_.input_dim_;
      if (idx < 1 || idx > limit)
        throw ParseError("variable '" + name + "' out of range (declared " +
                             (is_state ? "n=" : "m=") + std::to_string(limit) + ")",
                         t.pos);
      return add_node({is_state ? Op::var_x : Op::var_u, 0.0,
                       static_cast<int>(idx - 1), -1, -1});
    }
    Op fn;
    if (name == "sin") fn = Op::fn_sin;
    else if (name == "cos") fn = Op::fn_cos;
    else if (name == "exp") fn = Op::fn_exp;
    else if (name == "log") fn = Op::fn_log;
    else if (name == "sqrt") fn = Op::fn_sqrt;
    else if (name == "abs") fn = Op::fn_abs;
    else if (name == "tanh") fn = Op::fn_tanh;
    else throw ParseError("unknown identifier '" + name + "'", t.pos);

    const Token open = lex_.take();
    if (open.kind != Token::Kind::lparen)
      throw ParseError("expected '(' after '" + name + "'", open.pos);
    int arg = parse_expression();
    const Token close = lex_.take();
    if (close.kind != Token::Kind::rparen)
      throw ParseError("expected ')'", close.pos);
    return add_node({fn, 0.0, 0, arg, -1});
  }

  Lexer lex_;
  Expression expr_;
};

Expression Expression::parse(std::string_view source, int state_dim,
                             int input_dim) {
  if (source.empty()) throw ParseError("empty expression", 0);
  if (state_dim < 0 || input_dim < 0)
    throw ParseError("negative dimension", 0);
  return ExpressionParser(source, state_dim, input_dim).run();
}

namespace {

[[noreturn]] void domain_error(const char* what, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s (operand %.17g)", what, a);
  throw EvalError(buf);
}

double checked_pow(double base, double exponent) {
  if (base < 0.0 && std::nearbyint(exponent) != exponent)
    domain_error("fractional power of negative base", base);
  if (base == 0.0 && exponent < 0.0)
    domain_error("zero raised to negative power", exponent);
  return std::pow(base, exponent);
}

}  // namespace

double Expression::eval_node(int node, std::span<const double> x,
                             std::span<const double> u) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  double v;
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::var_x: return x[static_cast<std::size_t>(n.index)];
    case Op::var_u: return u[static_cast<std::size_t>(n.index)];
    case Op::neg: return -eval_node(n.lhs, x, u);
    case Op::add: return eval_node(n.lhs, x, u) + eval_node(n.rhs, x, u);
    case Op::sub: return eval_node(n.lhs, x, u) - eval_node(n.rhs, x, u);
    case Op::mul: return eval_node(n.lhs, x, u) * eval_node(n.rhs, x, u);
    case Op::div: {
      const double a = eval_node(n.lhs, x, u);
      const double b = eval_node(n.rhs, x, u);
      if (b == 0.0) domain_error("division by zero", a);
      v = a / b;
      break;
    }
    case Op::pow:
      v = checked_pow(eval_node(n.lhs, x, u), eval_node(n.rhs, x, u));
      break;
    case Op::fn_sin: v = std::sin(eval_node(n.lhs, x, u)); break;
    case Op::fn_cos: v = std::cos(eval_node(n.lhs, x, u)); break;
    case Op::fn_exp: v = std::exp(eval_node(n.lhs, x, u)); break;
    case Op::fn_log: {
      const double a = eval_node(n.lhs, x, u);
      if (a <= 0.0) domain_error("log of non-positive value", a);
      v = std::log(a);
      break;
    }
    case Op::fn_sqrt: {
      const double a = eval_node(n.lhs, x, u);
      if (a < 0.0) domain_error("sqrt of negative value", a);
      v = std::sqrt(a);
      break;
    }
    case Op::fn_abs: v = std::fabs(eval_node(n.lhs, x, u)); break;
    case Op::fn_tanh: v = std::tanh(eval_node(n.lhs, x, u)); break;
    default: throw EvalError("corrupt expression node");
  }
  if (!std::isfinite(v)) domain_error("non-finite result", v);
  return v;
}

double Expression::evaluate(std::span<const double> x,
                            std::span<const double> u) const {
  if (static_cast<int>(x.size()) != state_dim_ ||
      static_cast<int>(u.size()) != input_dim_)
    throw EvalError("evaluate: dimension mismatch");
  return eval_node(root_, x, u);
}

namespace {
// Binding strengths used only for printing.
enum Bind { bind_add = 1, bind_mul = 2, bind_neg = 3, bind_pow = 4, bind_atom = 5 };
}  // namespace

void Expression::print_node(int node, int parent_bind, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  int bind = bind_atom;
  std::string body;
  switch (n.op) {
    case Op::constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      body = buf;
      if (n.value < 0) bind = bind_neg;
      break;
    }
    case Op::var_x: body = "x" + std::to_string(n.index + 1); break;
    case Op::var_u: body = "u" + std::to_string(n.index + 1); break;
    case Op::neg:
      bind = bind_neg;
      body = "-";
      print_node(n.lhs, bind_neg, body);
      break;
    case Op::add: case Op::sub: {
      bind = bind_add;
      print_node(n.lhs, bind_add, body);
      body += n.op == Op::add ? " + " : " - ";
      print_node(n.rhs, bind_add + 1, body);
      break;
    }
    case Op::mul: case Op::div: {
      bind = bind_mul;
      print_node(n.lhs, bind_mul, body);
      body += n.op == Op::mul ? "*" : "/";
      print_node(n.rhs, bind_mul + 1, body);
      break;
    }
    case Op::pow: {
      bind = bind_pow;
      print_node(n.lhs, bind_pow + 1, body);  // left operand must re-paren
      body += "^";
      print_node(n.rhs, bind_pow, body);
      break;
    }
    default: {
      static const char* names[] = {"sin", "cos", "exp", "log", "sqrt", "abs", "tanh"};
      body = names[static_cast<int>(n.op) - static_cast<int>(Op::fn_sin)];
      body += "(";
      print_node(n.lhs, 0, body);
      body += ")";
      break;
    }
  }
  if (bind < parent_bind) {
    out += "(";
    out += body;
    out += ")";
  } else {
    out += body;
  }
}

std::string Expression::to_string() const {
  std::string out;
  print_node(root_, 0, out);
  return out;
}

}  // namespace robdoa
