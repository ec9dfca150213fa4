// Symbolic scalar expressions over coordinate variables x0..x{m-1}.
//
// Expr is an immutable, reference-counted tree. Arithmetic operators build
// lightly simplified nodes (constant folding, neutral elements, flattening of
// nested sums and products); parse() builds the raw tree exactly as written and
// simplify() applies the same rules bottom-up.
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srlab {

/// Exact rational while both operands are rational and nothing overflows,
/// double otherwise.
class Number {
 public:
  Number() = default;
  Number(std::int64_t numerator, std::int64_t denominator = 1);
  static Number real(double value);

  bool is_exact() const { return exact_; }
  bool is_zero() const;
  bool is_one() const;
  double value() const;
  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }

  Number operator-() const;
  friend Number operator+(const Number& a, const Number& b);
  friend Number operator*(const Number& a, const Number& b);
  /// Throws std::domain_error on a zero divisor.
  friend Number operator/(const Number& a, const Number& b);
  Number pow(int exponent) const;

 private:
  bool exact_ = true;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  double real_ = 0.0;
};

enum class ExprKind { Constant, Variable, Negate, Sum, Product, Quotient, Power, Sin, Cos, Exp };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Raised by evaluate() on a zero denominator (or 0 to a negative power).
class EvaluationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class Expr {
 public:
  /// The constant 0.
  Expr();
  Expr(std::int64_t value);  // NOLINT(google-explicit-constructor)
  explicit Expr(const Number& value);

  static Expr constant(const Number& value);
  static Expr real(double value);
  static Expr variable(int index);

  // Raw constructors: no simplification.
  static Expr raw_negate(Expr a);
  static Expr raw_sum(std::vector<Expr> terms);
  static Expr raw_product(std::vector<Expr> factors);
  /// Throws std::invalid_argument if the denominator is the literal zero.
  static Expr raw_quotient(Expr numerator, Expr denominator);
  static Expr raw_power(Expr base, int exponent);
  static Expr raw_function(ExprKind kind, Expr argument);

  ExprKind kind() const;
  /// Only meaningful for constants.
  const Number& number() const;
  /// Only meaningful for variables.
  int variable_index() const;
  /// Only meaningful for powers.
  int exponent() const;
  const std::vector<Expr>& args() const;

  bool is_constant() const { return kind() == ExprKind::Constant; }
  bool is_zero() const;
  bool is_one() const;
  /// Largest variable index appearing in the tree, -1 if none.
  int max_variable() const;
  std::size_t node_count() const;

  /// Throws EvaluationError on a vanishing denominator and std::out_of_range if
  /// a variable index is not covered by `point`.
  double evaluate(std::span<const double> point) const;

  /// Text in the parse() grammar; parse(to_string()) is evaluation-equivalent.
  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  Expr& operator+=(const Expr& other) { return *this = *this + other; }
  Expr& operator-=(const Expr& other) { return *this = *this - other; }
  Expr& operator*=(const Expr& other) { return *this = *this * other; }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr finish(std::shared_ptr<Node> node);
  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := base ('^' ['-'] integer)?
///   base   := number | 'x' integer | '(' expr ')' | ('sin'|'cos'|'exp') '(' expr ')'
/// Integer literals are exact; literals with '.' or an exponent are doubles.
/// Throws ParseError (with position) on bad syntax or a variable index >= dim.
Expr parse(std::string_view text, int dim);

Expr differentiate(const Expr& e, int axis);
Expr simplify(const Expr& e);

}  // namespace srlab
