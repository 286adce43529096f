#include "pdmp/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace pdmp::expr {

namespace {

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->value = v;
  return n;
}

NodePtr make_var(int index) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::variable;
  n->var_index = index;
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Node::Kind::constant && n->value == v;
}

double apply_unary(UnaryOp op, double a) {
  switch (op) {
    case UnaryOp::neg: return -a;
    case UnaryOp::sin: return std::sin(a);
    case UnaryOp::cos: return std::cos(a);
    case UnaryOp::exp: return std::exp(a);
    case UnaryOp::log: return std::log(a);
    case UnaryOp::sqrt: return std::sqrt(a);
    case UnaryOp::abs: return std::abs(a);
  }
  return 0.0;
}

double powi_value(double a, int n) {
  // Exponentiation by squaring; negative exponents via reciprocal.
  if (n == 0) return 1.0;
  bool inv = n < 0;
  unsigned long e = inv ? static_cast<unsigned long>(-(long)n) : static_cast<unsigned long>(n);
  double base = a, acc = 1.0;
  while (e != 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return inv ? 1.0 / acc : acc;
}

NodePtr make_unary(UnaryOp op, NodePtr a) {
  if (a->kind == Node::Kind::constant) {
    double v = apply_unary(op, a->value);
    if (std::isfinite(v)) return make_const(v);
  }
  // -(-u) = u
  if (op == UnaryOp::neg && a->kind == Node::Kind::unary && a->uop == UnaryOp::neg)
    return a->lhs;
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::unary;
  n->uop = op;
  n->lhs = std::move(a);
  return n;
}

NodePtr make_powi(NodePtr a, int e) {
  if (e == 0) return make_const(1.0);
  if (e == 1) return a;
  if (a->kind == Node::Kind::constant) {
    double v = powi_value(a->value, e);
    if (std::isfinite(v)) return make_const(v);
  }
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->bop = BinaryOp::pow;
  n->exponent = e;
  n->lhs = std::move(a);
  n->rhs = make_const(static_cast<double>(e));
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
  if (op == BinaryOp::pow)
    return make_powi(std::move(a), static_cast<int>(b->value));
  if (a->kind == Node::Kind::constant && b->kind == Node::Kind::constant) {
    double v = 0.0;
    switch (op) {
      case BinaryOp::add: v = a->value + b->value; break;
      case BinaryOp::sub: v = a->value - b->value; break;
      case BinaryOp::mul: v = a->value * b->value; break;
      case BinaryOp::div: v = a->value / b->value; break;
      case BinaryOp::pow: break;
    }
    if (std::isfinite(v)) return make_const(v);
  }
  switch (op) {
    case BinaryOp::add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case BinaryOp::sub:
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make_unary(UnaryOp::neg, std::move(b));
      break;
    case BinaryOp::mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case BinaryOp::div:
      if (is_const(a, 0.0)) return make_const(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case BinaryOp::pow:
      break;
  }
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->bop = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

int max_var_index(const NodePtr& n) {
  if (!n) return 0;
  switch (n->kind) {
    case Node::Kind::constant: return 0;
    case Node::Kind::variable: return n->var_index;
    case Node::Kind::unary: return max_var_index(n->lhs);
    case Node::Kind::binary: return std::max(max_var_index(n->lhs), max_var_index(n->rhs));
  }
  return 0;
}

void compile_node(const NodePtr& n, std::vector<Instr>& out) {
  switch (n->kind) {
    case Node::Kind::constant:
      out.push_back({Instr::Code::push_const, n->value, 0});
      return;
    case Node::Kind::variable:
      out.push_back({Instr::Code::push_var, 0.0, n->var_index - 1});
      return;
    case Node::Kind::unary: {
      compile_node(n->lhs, out);
      Instr::Code c = Instr::Code::neg;
      switch (n->uop) {
        case UnaryOp::neg: c = Instr::Code::neg; break;
        case UnaryOp::sin: c = Instr::Code::sin; break;
        case UnaryOp::cos: c = Instr::Code::cos; break;
        case UnaryOp::exp: c = Instr::Code::exp; break;
        case UnaryOp::log: c = Instr::Code::log; break;
        case UnaryOp::sqrt: c = Instr::Code::sqrt; break;
        case UnaryOp::abs: c = Instr::Code::abs; break;
      }
      out.push_back({c, 0.0, 0});
      return;
    }
    case Node::Kind::binary: {
      compile_node(n->lhs, out);
      if (n->bop == BinaryOp::pow) {
        out.push_back({Instr::Code::powi, 0.0, n->exponent});
        return;
      }
      compile_node(n->rhs, out);
      Instr::Code c = Instr::Code::add;
      switch (n->bop) {
        case BinaryOp::add: c = Instr::Code::add; break;
        case BinaryOp::sub: c = Instr::Code::sub; break;
        case BinaryOp::mul: c = Instr::Code::mul; break;
        case BinaryOp::div: c = Instr::Code::div; break;
        case BinaryOp::pow: break;
      }
      out.push_back({c, 0.0, 0});
      return;
    }
  }
}

std::size_t program_stack_need(const std::vector<Instr>& prog) {
  std::size_t depth = 0, need = 0;
  for (const auto& ins : prog) {
    switch (ins.code) {
      case Instr::Code::push_const:
      case Instr::Code::push_var:
        ++depth;
        break;
      case Instr::Code::add:
      case Instr::Code::sub:
      case Instr::Code::mul:
      case Instr::Code::div:
        --depth;
        break;
      default:
        break;  // unary and powi keep depth
    }
    need = std::max(need, depth);
  }
  return need;
}

NodePtr diff_node(const NodePtr& n, int k);

NodePtr diff_unary(const NodePtr& n, int k) {
  NodePtr u = n->lhs;
  NodePtr du = diff_node(u, k);
  switch (n->uop) {
    case UnaryOp::neg:
      return make_unary(UnaryOp::neg, du);
    case UnaryOp::sin:
      return make_binary(BinaryOp::mul, make_unary(UnaryOp::cos, u), du);
    case UnaryOp::cos:
      return make_unary(UnaryOp::neg,
                        make_binary(BinaryOp::mul, make_unary(UnaryOp::sin, u), du));
    case UnaryOp::exp:
      return make_binary(BinaryOp::mul, make_unary(UnaryOp::exp, u), du);
    case UnaryOp::log:
      return make_binary(BinaryOp::div, du, u);
    case UnaryOp::sqrt:
      return make_binary(BinaryOp::div, du,
                         make_binary(BinaryOp::mul, make_const(2.0),
                                     make_unary(UnaryOp::sqrt, u)));
    case UnaryOp::abs:
      // d|u| = u/|u| * du; undefined at u = 0 and caught by domain checks.
      return make_binary(BinaryOp::mul,
                         make_binary(BinaryOp::div, u, make_unary(UnaryOp::abs, u)), du);
  }
  return make_const(0.0);
}

NodePtr diff_node(const NodePtr& n, int k) {
  switch (n->kind) {
    case Node::Kind::constant:
      return make_const(0.0);
    case Node::Kind::variable:
      return make_const(n->var_index == k ? 1.0 : 0.0);
    case Node::Kind::unary:
      return diff_unary(n, k);
    case Node::Kind::binary: {
      const NodePtr& a = n->lhs;
      const NodePtr& b = n->rhs;
      switch (n->bop) {
        case BinaryOp::add:
          return make_binary(BinaryOp::add, diff_node(a, k), diff_node(b, k));
        case BinaryOp::sub:
          return make_binary(BinaryOp::sub, diff_node(a, k), diff_node(b, k));
        case BinaryOp::mul:
          return make_binary(BinaryOp::add,
                             make_binary(BinaryOp::mul, diff_node(a, k), b),
                             make_binary(BinaryOp::mul, a, diff_node(b, k)));
        case BinaryOp::div:
          // (a/b)' = a'/b - a b' / b^2
          return make_binary(
              BinaryOp::sub, make_binary(BinaryOp::div, diff_node(a, k), b),
              make_binary(BinaryOp::div, make_binary(BinaryOp::mul, a, diff_node(b, k)),
                          make_powi(b, 2)));
        case BinaryOp::pow: {
          // (u^n)' = n u^(n-1) u'
          int e = n->exponent;
          return make_binary(BinaryOp::mul, make_const(static_cast<double>(e)),
                             make_binary(BinaryOp::mul, make_powi(a, e - 1),
                                         diff_node(a, k)));
        }
      }
      return make_const(0.0);
    }
  }
  return make_const(0.0);
}

void print_node(const NodePtr& n, std::ostream& os) {
  switch (n->kind) {
    case Node::Kind::constant: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n->value;
      std::string s = tmp.str();
      if (n->value < 0.0) os << "(" << s << ")";
      else os << s;
      return;
    }
    case Node::Kind::variable:
      os << "x" << n->var_index;
      return;
    case Node::Kind::unary: {
      const char* name = nullptr;
      switch (n->uop) {
        case UnaryOp::neg: name = "-"; break;
        case UnaryOp::sin: name = "sin"; break;
        case UnaryOp::cos: name = "cos"; break;
        case UnaryOp::exp: name = "exp"; break;
        case UnaryOp::log: name = "log"; break;
        case UnaryOp::sqrt: name = "sqrt"; break;
        case UnaryOp::abs: name = "abs"; break;
      }
      if (n->uop == UnaryOp::neg) {
        os << "(-";
        print_node(n->lhs, os);
        os << ")";
      } else {
        os << name << "(";
        print_node(n->lhs, os);
        os << ")";
      }
      return;
    }
    case Node::Kind::binary: {
      if (n->bop == BinaryOp::pow) {
        os << "(";
        print_node(n->lhs, os);
        os << "^" << n->exponent << ")";
        return;
      }
      const char* op = "+";
      switch (n->bop) {
        case BinaryOp::add: op = "+"; break;
        case BinaryOp::sub: op = "-"; break;
        case BinaryOp::mul: op = "*"; break;
        case BinaryOp::div: op = "/"; break;
        case BinaryOp::pow: break;
      }
      os << "(";
      print_node(n->lhs, os);
      os << op;
      print_node(n->rhs, os);
      os << ")";
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Recursive-descent parser.
// expr    := term (('+'|'-') term)*
// term    := factor (('*'|'/') factor)*
// factor  := '-' factor | power
// power   := atom ('^' intexp)?        (right-associative via intexp = power?)
// atom    := number | ident '(' expr ')' | xN | '(' expr ')'
// ---------------------------------------------------------------------------
class Parser {
 public:
  Parser(const std::string& text, int dim) : text_(text), dim_(dim) {}

  NodePtr parse() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw SyntaxError(pos_, "unexpected trailing input");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (eat('+')) lhs = make_binary(BinaryOp::add, lhs, parse_term());
      else if (eat('-')) lhs = make_binary(BinaryOp::sub, lhs, parse_term());
      else return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      if (eat('*')) lhs = make_binary(BinaryOp::mul, lhs, parse_factor());
      else if (eat('/')) lhs = make_binary(BinaryOp::div, lhs, parse_factor());
      else return lhs;
    }
  }

  NodePtr parse_factor() {
    if (eat('-')) return make_unary(UnaryOp::neg, parse_factor());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (eat('^')) {
      int e = parse_int_exponent();
      return make_powi(base, e);
    }
    return base;
  }

  // The exponent must reduce to a constant integer. A chain a^b^c is
  // right-associative, so b^c must itself fold to a constant integer.
  int parse_int_exponent() {
    skip_ws();
    std::size_t at = pos_;
    NodePtr e = parse_factor();
    if (eat('^')) {
      int inner = parse_int_exponent();
      e = make_powi(e, inner);
    }
    if (e->kind != Node::Kind::constant)
      throw NonIntegerExponent("exponent does not reduce to a constant (position " +
                               std::to_string(at) + ")");
    double v = e->value;
    if (v != std::floor(v) || std::abs(v) > 1e9)
      throw NonIntegerExponent("exponent " + std::to_string(v) + " is not an integer");
    return static_cast<int>(v);
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!eat(')')) throw SyntaxError(pos_, "expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw SyntaxError(pos_, std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw SyntaxError(pos_, "malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_const(v);
  }

  NodePtr parse_ident() {
    std::size_t at = pos_;
    std::string name;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      name += text_[pos_++];
    }
    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int idx = std::atoi(name.c_str() + 1);
      if (idx < 1 || idx > dim_) throw UnknownVariable(name);
      return make_var(idx);
    }
    UnaryOp op;
    if (name == "sin") op = UnaryOp::sin;
    else if (name == "cos") op = UnaryOp::cos;
    else if (name == "exp") op = UnaryOp::exp;
    else if (name == "log") op = UnaryOp::log;
    else if (name == "sqrt") op = UnaryOp::sqrt;
    else if (name == "abs") op = UnaryOp::abs;
    else throw UnknownVariable(name);
    if (!eat('(')) throw SyntaxError(at, "expected '(' after function name " + name);
    NodePtr arg = parse_expr();
    if (!eat(')')) throw SyntaxError(pos_, "expected ')'");
    return make_unary(op, arg);
  }

  const std::string& text_;
  int dim_;
  std::size_t pos_ = 0;
};

double eval_node(const Node* n, std::span<const double> x) {
  switch (n->kind) {
    case Node::Kind::constant:
      return n->value;
    case Node::Kind::variable:
      return x[static_cast<std::size_t>(n->var_index - 1)];
    case Node::Kind::unary: {
      double a = eval_node(n->lhs.get(), x);
      double v = apply_unary(n->uop, a);
      if (!std::isfinite(v))
        throw DomainError("non-finite value in unary operation");
      return v;
    }
    case Node::Kind::binary: {
      double a = eval_node(n->lhs.get(), x);
      if (n->bop == BinaryOp::pow) {
        double v = powi_value(a, n->exponent);
        if (!std::isfinite(v)) throw DomainError("non-finite value in pow");
        return v;
      }
      double b = eval_node(n->rhs.get(), x);
      double v = 0.0;
      switch (n->bop) {
        case BinaryOp::add: v = a + b; break;
        case BinaryOp::sub: v = a - b; break;
        case BinaryOp::mul: v = a * b; break;
        case BinaryOp::div: v = a / b; break;
        case BinaryOp::pow: break;
      }
      if (!std::isfinite(v))
        throw DomainError("non-finite value in binary operation");
      return v;
    }
  }
  return 0.0;
}

}  // namespace

Expression::Expression(NodePtr root, int dimension) : root_(std::move(root)), dim_(dimension) {
  int needed = max_var_index(root_);
  if (needed > dim_)
    throw UnknownVariable("x" + std::to_string(needed));
  compile_node(root_, program_);
  stack_need_ = program_stack_need(program_);
}

double Expression::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) < dim_)
    throw DomainError("point has fewer coordinates than expression dimension");
  return eval_node(root_.get(), x);
}

double Expression::run(std::span<const double> x, double* stack) const {
  // Instructions that can turn finite inputs non-finite check their result,
  // so compiled evaluation reports domain errors like the tree walk does.
  const auto guard = [](double v) {
    if (!std::isfinite(v)) throw DomainError("non-finite expression value");
    return v;
  };
  double* sp = stack;
  for (const auto& ins : program_) {
    switch (ins.code) {
      case Instr::Code::push_const: *sp++ = ins.value; break;
      case Instr::Code::push_var: *sp++ = x[static_cast<std::size_t>(ins.arg)]; break;
      case Instr::Code::neg: sp[-1] = -sp[-1]; break;
      case Instr::Code::sin: sp[-1] = std::sin(sp[-1]); break;
      case Instr::Code::cos: sp[-1] = std::cos(sp[-1]); break;
      case Instr::Code::exp: sp[-1] = guard(std::exp(sp[-1])); break;
      case Instr::Code::log: sp[-1] = guard(std::log(sp[-1])); break;
      case Instr::Code::sqrt: sp[-1] = guard(std::sqrt(sp[-1])); break;
      case Instr::Code::abs: sp[-1] = std::abs(sp[-1]); break;
      case Instr::Code::powi: sp[-1] = guard(powi_value(sp[-1], ins.arg)); break;
      case Instr::Code::add: sp[-2] = sp[-2] + sp[-1]; --sp; break;
      case Instr::Code::sub: sp[-2] = sp[-2] - sp[-1]; --sp; break;
      case Instr::Code::mul: sp[-2] = sp[-2] * sp[-1]; --sp; break;
      case Instr::Code::div: sp[-2] = guard(sp[-2] / sp[-1]); --sp; break;
    }
  }
  double v = stack[0];
  if (!std::isfinite(v)) throw DomainError("non-finite expression value");
  return v;
}

Expression Expression::differentiate(int k) const {
  if (k < 1 || k > dim_)
    throw DomainError("derivative index out of range: " + std::to_string(k));
  return Expression(diff_node(root_, k), dim_);
}

std::string Expression::print() const {
  std::ostringstream os;
  print_node(root_, os);
  return os.str();
}

bool Expression::is_constant_zero() const {
  return root_ && root_->kind == Node::Kind::constant && root_->value == 0.0;
}

bool Expression::is_constant() const {
  return root_ && root_->kind == Node::Kind::constant;
}

Expression parse(const std::string& text, int dimension) {
  Parser p(text, dimension);
  return Expression(p.parse(), dimension);
}

Expression constant(double v, int dimension) { return Expression(make_const(v), dimension); }

Expression variable(int index, int dimension) {
  if (index < 1 || index > dimension) throw UnknownVariable("x" + std::to_string(index));
  return Expression(make_var(index), dimension);
}

Expression unary(UnaryOp op, const Expression& a) {
  return Expression(make_unary(op, a.root()), a.dimension());
}

Expression binary(BinaryOp op, const Expression& a, const Expression& b) {
  if (a.dimension() != b.dimension())
    throw DomainError("dimension mismatch in expression arithmetic");
  if (op == BinaryOp::pow)
    throw NonIntegerExponent("use powi() to build integer powers");
  return Expression(make_binary(op, a.root(), b.root()), a.dimension());
}

Expression powi(const Expression& a, int n) {
  return Expression(make_powi(a.root(), n), a.dimension());
}

}  // namespace pdmp::expr
