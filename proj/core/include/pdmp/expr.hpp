#ifndef PDMP_EXPR_HPP
#define PDMP_EXPR_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pdmp/errors.hpp"

namespace pdmp::expr {

enum class UnaryOp : std::uint8_t { neg, sin, cos, exp, log, sqrt, abs };
enum class BinaryOp : std::uint8_t { add, sub, mul, div, pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// Immutable expression tree over variables x1..xd. pow is restricted to
// constant integer exponents so that differentiation stays total.
struct Node {
  enum class Kind : std::uint8_t { constant, variable, unary, binary } kind;
  double value = 0.0;        // constant
  int var_index = 0;         // variable, 1-based
  UnaryOp uop = UnaryOp::neg;
  BinaryOp bop = BinaryOp::add;
  int exponent = 0;          // pow only
  NodePtr lhs, rhs;          // unary uses lhs
};

// One instruction of the flattened (postfix) evaluation program.
struct Instr {
  enum class Code : std::uint8_t {
    push_const, push_var, neg, sin, cos, exp, log, sqrt, abs,
    add, sub, mul, div, powi
  } code;
  double value = 0.0;
  int arg = 0;  // variable index (0-based) or integer exponent
};

class Expression {
 public:
  Expression() = default;
  Expression(NodePtr root, int dimension);

  int dimension() const { return dim_; }
  const NodePtr& root() const { return root_; }
  bool empty() const { return root_ == nullptr; }

  // IEEE-double evaluation; throws DomainError on a non-finite intermediate.
  double evaluate(std::span<const double> x) const;

  // Exact symbolic partial derivative with respect to x_k (1-based).
  Expression differentiate(int k) const;

  // Unambiguous round-trippable serialization.
  std::string print() const;

  bool is_constant_zero() const;
  bool is_constant() const;

  // Structural identity of the printed form; used for family deduplication.
  bool same_structure(const Expression& other) const { return print() == other.print(); }

  const std::vector<Instr>& program() const { return program_; }
  std::size_t stack_need() const { return stack_need_; }

  // Evaluates the compiled program. `stack` must have at least stack_need()
  // slots. Same results and error behaviour as evaluate().
  double run(std::span<const double> x, double* stack) const;

 private:
  NodePtr root_;
  int dim_ = 0;
  std::vector<Instr> program_;
  std::size_t stack_need_ = 0;
};

// Parses `text` over variables x1..xd. Grammar: numbers, x1..xd, + - * / ^,
// parentheses, sin cos exp log sqrt abs; precedence ^ > unary minus > * / >
// + -; ^ is right-associative and requires a constant integer exponent.
Expression parse(const std::string& text, int dimension);

// Constructors used to assemble derivative and bracket expressions.
// Constant folding only (identities with 0 and 1, constant subtrees).
Expression constant(double v, int dimension);
Expression variable(int index, int dimension);
Expression unary(UnaryOp op, const Expression& a);
Expression binary(BinaryOp op, const Expression& a, const Expression& b);
Expression powi(const Expression& a, int n);

inline Expression operator+(const Expression& a, const Expression& b) {
  return binary(BinaryOp::add, a, b);
}
inline Expression operator-(const Expression& a, const Expression& b) {
  return binary(BinaryOp::sub, a, b);
}
inline Expression operator*(const Expression& a, const Expression& b) {
  return binary(BinaryOp::mul, a, b);
}
inline Expression operator/(const Expression& a, const Expression& b) {
  return binary(BinaryOp::div, a, b);
}
inline Expression operator-(const Expression& a) { return unary(UnaryOp::neg, a); }

}  // namespace pdmp::expr

#endif  // PDMP_EXPR_HPP
