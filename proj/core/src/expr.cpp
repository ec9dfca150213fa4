#include "srlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

namespace srlab {

// ---------------------------------------------------------------------------
// Number

namespace {

using i128 = __int128;

bool fits(i128 v) {
  return v >= static_cast<i128>(INT64_MIN) + 1 && v <= static_cast<i128>(INT64_MAX);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Normalized rational from 128-bit parts; falls back to double on overflow.
Number from_wide(i128 num, i128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (fits(num) && fits(den)) {
    return Number(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  }
  return Number::real(static_cast<double>(num) / static_cast<double>(den));
}

}  // namespace

Number::Number(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::domain_error("rational with zero denominator");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  std::int64_t g = std::gcd(numerator, denominator);
  if (g > 1) {
    numerator /= g;
    denominator /= g;
  }
  num_ = numerator;
  den_ = denominator;
  real_ = static_cast<double>(num_) / static_cast<double>(den_);
}

Number Number::real(double value) {
  Number n;
  n.exact_ = false;
  n.real_ = value;
  return n;
}

bool Number::is_zero() const { return exact_ ? num_ == 0 : real_ == 0.0; }
bool Number::is_one() const { return exact_ ? (num_ == 1 && den_ == 1) : real_ == 1.0; }
double Number::value() const { return real_; }

Number Number::operator-() const {
  if (exact_) return Number(-num_, den_);
  return real(-real_);
}

Number operator+(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    return from_wide(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                     static_cast<i128>(a.den_) * b.den_);
  }
  return Number::real(a.value() + b.value());
}

Number operator*(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    return from_wide(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
  }
  return Number::real(a.value() * b.value());
}

Number operator/(const Number& a, const Number& b) {
  if (b.is_zero()) throw std::domain_error("division by zero constant");
  if (a.exact_ && b.exact_) {
    return from_wide(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
  }
  return Number::real(a.value() / b.value());
}

Number Number::pow(int exponent) const {
  if (exponent < 0) return Number(1) / pow(-exponent);
  Number result(1);
  Number base = *this;
  unsigned e = static_cast<unsigned>(exponent);
  while (e != 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e != 0) base = base * base;
  }
  return result;
}

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)), position_(position) {}

// ---------------------------------------------------------------------------
// Nodes

struct Expr::Node {
  ExprKind kind = ExprKind::Constant;
  Number number;
  int index = 0;  // variable index or power exponent
  std::vector<Expr> args;
  int max_var = -1;
  std::size_t size = 1;
};

Expr::Expr() : Expr(Number(0)) {}
Expr::Expr(std::int64_t value) : Expr(Number(value)) {}

Expr::Expr(const Number& value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Constant;
  n->number = value;
  node_ = std::move(n);
}

Expr Expr::constant(const Number& value) { return Expr(value); }
Expr Expr::real(double value) { return Expr(Number::real(value)); }

Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("negative variable index");
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Variable;
  n->index = index;
  n->max_var = index;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::raw_negate(Expr a) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Negate;
  n->max_var = a.max_variable();
  n->size = 1 + a.node_count();
  n->args.push_back(std::move(a));
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::finish(std::shared_ptr<Node> n) {
  n->size = 1;
  n->max_var = n->kind == ExprKind::Variable ? n->index : -1;
  for (const auto& a : n->args) {
    n->size += a.node_count();
    n->max_var = std::max(n->max_var, a.max_variable());
  }
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::raw_sum(std::vector<Expr> terms) {
  if (terms.empty()) return Expr();
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Sum;
  n->args = std::move(terms);
  return finish(std::move(n));
}

Expr Expr::raw_product(std::vector<Expr> factors) {
  if (factors.empty()) return Expr(1);
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Product;
  n->args = std::move(factors);
  return finish(std::move(n));
}

Expr Expr::raw_quotient(Expr numerator, Expr denominator) {
  if (denominator.is_zero()) throw std::invalid_argument("quotient with literal zero denominator");
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Quotient;
  n->args = {std::move(numerator), std::move(denominator)};
  return finish(std::move(n));
}

Expr Expr::raw_power(Expr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Power;
  n->index = exponent;
  n->args = {std::move(base)};
  return finish(std::move(n));
}

Expr Expr::raw_function(ExprKind kind, Expr argument) {
  if (kind != ExprKind::Sin && kind != ExprKind::Cos && kind != ExprKind::Exp) {
    throw std::invalid_argument("raw_function expects sin, cos or exp");
  }
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->args = {std::move(argument)};
  return finish(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
const Number& Expr::number() const { return node_->number; }
int Expr::variable_index() const { return node_->index; }
int Expr::exponent() const { return node_->index; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
bool Expr::is_zero() const { return is_constant() && number().is_zero(); }
bool Expr::is_one() const { return is_constant() && number().is_one(); }
int Expr::max_variable() const { return node_->max_var; }
std::size_t Expr::node_count() const { return node_->size; }

// ---------------------------------------------------------------------------
// Evaluation

double Expr::evaluate(std::span<const double> point) const {
  const Node& n = *node_;
  switch (n.kind) {
    case ExprKind::Constant:
      return n.number.value();
    case ExprKind::Variable:
      if (static_cast<std::size_t>(n.index) >= point.size()) {
        throw std::out_of_range("variable x" + std::to_string(n.index) + " outside point dimension");
      }
      return point[static_cast<std::size_t>(n.index)];
    case ExprKind::Negate:
      return -n.args[0].evaluate(point);
    case ExprKind::Sum: {
      double s = 0.0;
      for (const auto& a : n.args) s += a.evaluate(point);
      return s;
    }
    case ExprKind::Product: {
      double s = 1.0;
      for (const auto& a : n.args) s *= a.evaluate(point);
      return s;
    }
    case ExprKind::Quotient: {
      double den = n.args[1].evaluate(point);
      if (den == 0.0) throw EvaluationError("division by zero");
      return n.args[0].evaluate(point) / den;
    }
    case ExprKind::Power: {
      double b = n.args[0].evaluate(point);
      if (b == 0.0 && n.index < 0) throw EvaluationError("zero raised to a negative power");
      int e = n.index < 0 ? -n.index : n.index;
      double r = 1.0;
      double p = b;
      while (e != 0) {
        if (e & 1) r *= p;
        e >>= 1;
        if (e != 0) p *= p;
      }
      return n.index < 0 ? 1.0 / r : r;
    }
    case ExprKind::Sin:
      return std::sin(n.args[0].evaluate(point));
    case ExprKind::Cos:
      return std::cos(n.args[0].evaluate(point));
    case ExprKind::Exp:
      return std::exp(n.args[0].evaluate(point));
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Simplifying constructors

namespace {

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind() || a.node_count() != b.node_count()) return false;
  switch (a.kind()) {
    case ExprKind::Constant: {
      const Number& x = a.number();
      const Number& y = b.number();
      if (x.is_exact() != y.is_exact()) return false;
      return x.is_exact() ? (x.numerator() == y.numerator() && x.denominator() == y.denominator())
                          : x.value() == y.value();
    }
    case ExprKind::Variable:
      return a.variable_index() == b.variable_index();
    case ExprKind::Power:
      if (a.exponent() != b.exponent()) return false;
      break;
    default:
      break;
  }
  const auto& xa = a.args();
  const auto& xb = b.args();
  if (xa.size() != xb.size()) return false;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    if (!structurally_equal(xa[i], xb[i])) return false;
  }
  return true;
}

Expr make_product(std::vector<Expr> factors);
Expr make_power(const Expr& base, int exponent);

Expr make_negate(const Expr& a) {
  if (a.is_constant()) return Expr(-a.number());
  if (a.kind() == ExprKind::Negate) return a.args()[0];
  if (a.kind() == ExprKind::Product && a.args()[0].is_constant()) {
    std::vector<Expr> f = a.args();
    f[0] = Expr(-f[0].number());
    return make_product(std::move(f));
  }
  return Expr::raw_negate(a);
}

// Split a term into numeric coefficient and remaining factor.
std::pair<Number, Expr> split_coefficient(const Expr& t) {
  if (t.kind() == ExprKind::Negate) {
    auto [c, rest] = split_coefficient(t.args()[0]);
    return {-c, rest};
  }
  if (t.kind() == ExprKind::Product && t.args()[0].is_constant()) {
    std::vector<Expr> rest(t.args().begin() + 1, t.args().end());
    Expr r = rest.size() == 1 ? rest[0] : Expr::raw_product(std::move(rest));
    return {t.args()[0].number(), r};
  }
  return {Number(1), t};
}

Expr scale(const Number& c, const Expr& e) {
  if (c.is_zero()) return Expr();
  if (c.is_one()) return e;
  if (c.is_exact() && c.numerator() == -1 && c.denominator() == 1) return make_negate(e);
  return make_product({Expr(c), e});
}

Expr make_sum(const std::vector<Expr>& input) {
  std::vector<Expr> flat;
  Number constant(0);
  auto push = [&](const Expr& t, auto&& self) -> void {
    if (t.is_constant()) {
      constant = constant + t.number();
    } else if (t.kind() == ExprKind::Sum) {
      for (const auto& s : t.args()) self(s, self);
    } else {
      flat.push_back(t);
    }
  };
  for (const auto& t : input) push(t, push);

  // Combine like terms c1*r + c2*r.
  std::vector<std::pair<Number, Expr>> grouped;
  for (const auto& t : flat) {
    auto [c, rest] = split_coefficient(t);
    bool merged = false;
    for (auto& g : grouped) {
      if (structurally_equal(g.second, rest)) {
        g.first = g.first + c;
        merged = true;
        break;
      }
    }
    if (!merged) grouped.emplace_back(c, rest);
  }
  std::vector<Expr> terms;
  for (auto& [c, rest] : grouped) {
    if (c.is_zero()) continue;
    terms.push_back(scale(c, rest));
  }
  if (!constant.is_zero()) terms.push_back(Expr(constant));
  if (terms.empty()) return Expr(constant);
  if (terms.size() == 1) return terms[0];
  return Expr::raw_sum(std::move(terms));
}

Expr make_product(std::vector<Expr> input) {
  std::vector<Expr> flat;
  Number constant(1);
  auto push = [&](const Expr& f, auto&& self) -> void {
    if (f.is_constant()) {
      constant = constant * f.number();
    } else if (f.kind() == ExprKind::Product) {
      for (const auto& s : f.args()) self(s, self);
    } else if (f.kind() == ExprKind::Negate) {
      constant = -constant;
      self(f.args()[0], self);
    } else {
      flat.push_back(f);
    }
  };
  for (const auto& f : input) push(f, push);
  if (constant.is_zero()) return Expr(constant);

  // Merge repeated bases: x * x^2 -> x^3.
  std::vector<std::pair<Expr, int>> powers;
  for (const auto& f : flat) {
    Expr base = f;
    int e = 1;
    if (f.kind() == ExprKind::Power) {
      base = f.args()[0];
      e = f.exponent();
    }
    bool merged = false;
    for (auto& p : powers) {
      if (structurally_equal(p.first, base)) {
        p.second += e;
        merged = true;
        break;
      }
    }
    if (!merged) powers.emplace_back(base, e);
  }
  std::vector<Expr> factors;
  for (auto& [base, e] : powers) {
    Expr p = make_power(base, e);
    if (p.is_constant()) {
      constant = constant * p.number();
    } else {
      factors.push_back(p);
    }
  }
  if (factors.empty()) return Expr(constant);
  if (constant.is_one() && factors.size() == 1) return factors[0];
  if (constant.is_exact() && constant.numerator() == -1 && constant.denominator() == 1) {
    Expr rest = factors.size() == 1 ? factors[0] : Expr::raw_product(std::move(factors));
    return Expr::raw_negate(rest);
  }
  if (!constant.is_one()) factors.insert(factors.begin(), Expr(constant));
  return Expr::raw_product(std::move(factors));
}

Expr make_quotient(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::invalid_argument("quotient with literal zero denominator");
  if (b.is_one()) return a;
  if (a.is_zero()) return Expr();
  if (b.is_constant()) return make_product({Expr(Number(1) / b.number()), a});
  if (structurally_equal(a, b)) return Expr(1);
  if (b.kind() == ExprKind::Negate) return make_negate(make_quotient(a, b.args()[0]));
  return Expr::raw_quotient(a, b);
}

Expr make_power(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    if (base.number().is_zero() && exponent < 0) return Expr::raw_power(base, exponent);
    return Expr(base.number().pow(exponent));
  }
  if (base.kind() == ExprKind::Power) return make_power(base.args()[0], base.exponent() * exponent);
  return Expr::raw_power(base, exponent);
}

Expr make_function(ExprKind kind, const Expr& a) {
  if (a.is_constant()) {
    if (a.number().is_zero()) return kind == ExprKind::Sin ? Expr(0) : Expr(1);
    double v = a.number().value();
    switch (kind) {
      case ExprKind::Sin: return Expr::real(std::sin(v));
      case ExprKind::Cos: return Expr::real(std::cos(v));
      default: return Expr::real(std::exp(v));
    }
  }
  return Expr::raw_function(kind, a);
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) { return make_sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return make_sum({a, make_negate(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return make_product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return make_quotient(a, b); }
Expr operator-(const Expr& a) { return make_negate(a); }
Expr pow(const Expr& base, int exponent) { return make_power(base, exponent); }
Expr sin(const Expr& a) { return make_function(ExprKind::Sin, a); }
Expr cos(const Expr& a) { return make_function(ExprKind::Cos, a); }
Expr exp(const Expr& a) { return make_function(ExprKind::Exp, a); }

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Constant:
    case ExprKind::Variable:
      return e;
    case ExprKind::Negate:
      return make_negate(simplify(e.args()[0]));
    case ExprKind::Sum: {
      std::vector<Expr> terms;
      terms.reserve(e.args().size());
      for (const auto& a : e.args()) terms.push_back(simplify(a));
      return make_sum(terms);
    }
    case ExprKind::Product: {
      std::vector<Expr> factors;
      factors.reserve(e.args().size());
      for (const auto& a : e.args()) factors.push_back(simplify(a));
      return make_product(std::move(factors));
    }
    case ExprKind::Quotient:
      return make_quotient(simplify(e.args()[0]), simplify(e.args()[1]));
    case ExprKind::Power:
      return make_power(simplify(e.args()[0]), e.exponent());
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Exp:
      return make_function(e.kind(), simplify(e.args()[0]));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation

Expr differentiate(const Expr& e, int axis) {
  if (axis < 0) throw std::invalid_argument("negative differentiation axis");
  switch (e.kind()) {
    case ExprKind::Constant:
      return Expr();
    case ExprKind::Variable:
      return Expr(e.variable_index() == axis ? 1 : 0);
    case ExprKind::Negate:
      return -differentiate(e.args()[0], axis);
    case ExprKind::Sum: {
      std::vector<Expr> terms;
      for (const auto& a : e.args()) {
        Expr d = differentiate(a, axis);
        if (!d.is_zero()) terms.push_back(std::move(d));
      }
      return make_sum(terms);
    }
    case ExprKind::Product: {
      const auto& f = e.args();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < f.size(); ++i) {
        Expr d = differentiate(f[i], axis);
        if (d.is_zero()) continue;
        std::vector<Expr> factors;
        factors.reserve(f.size());
        for (std::size_t j = 0; j < f.size(); ++j) factors.push_back(j == i ? d : f[j]);
        terms.push_back(make_product(std::move(factors)));
      }
      return make_sum(terms);
    }
    case ExprKind::Quotient: {
      const Expr& a = e.args()[0];
      const Expr& b = e.args()[1];
      Expr da = differentiate(a, axis);
      Expr db = differentiate(b, axis);
      if (db.is_zero()) return da / b;
      return (da * b - a * db) / pow(b, 2);
    }
    case ExprKind::Power: {
      const Expr& b = e.args()[0];
      Expr db = differentiate(b, axis);
      if (db.is_zero()) return Expr();
      return Expr(static_cast<std::int64_t>(e.exponent())) * pow(b, e.exponent() - 1) * db;
    }
    case ExprKind::Sin: {
      Expr da = differentiate(e.args()[0], axis);
      if (da.is_zero()) return Expr();
      return cos(e.args()[0]) * da;
    }
    case ExprKind::Cos: {
      Expr da = differentiate(e.args()[0], axis);
      if (da.is_zero()) return Expr();
      return -(sin(e.args()[0]) * da);
    }
    case ExprKind::Exp: {
      Expr da = differentiate(e.args()[0], axis);
      if (da.is_zero()) return Expr();
      return e * da;
    }
  }
  return Expr();
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecUnary = 3;
constexpr int kPrecPower = 4;
constexpr int kPrecAtom = 5;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::pair<std::string, int> render(const Expr& e);

std::string wrap(const Expr& e, int required) {
  auto [text, prec] = render(e);
  if (prec < required) return "(" + text + ")";
  return text;
}

std::pair<std::string, int> render(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Constant: {
      const Number& n = e.number();
      std::string body;
      bool negative = n.value() < 0.0 || (n.is_exact() && n.numerator() < 0);
      if (n.is_exact()) {
        std::int64_t num = n.numerator() < 0 ? -n.numerator() : n.numerator();
        body = std::to_string(num);
        if (n.denominator() != 1) {
          body += "/" + std::to_string(n.denominator());
          return {(negative ? "-" : "") + body, negative ? kPrecUnary - 1 : kPrecProduct};
        }
      } else {
        body = format_real(negative ? -n.value() : n.value());
      }
      if (negative) return {"-" + body, kPrecUnary};
      return {body, kPrecAtom};
    }
    case ExprKind::Variable:
      return {"x" + std::to_string(e.variable_index()), kPrecAtom};
    case ExprKind::Negate:
      return {"-" + wrap(e.args()[0], kPrecUnary), kPrecUnary};
    case ExprKind::Sum: {
      std::string out;
      bool first = true;
      for (const auto& t : e.args()) {
        if (first) {
          out = wrap(t, kPrecSum);
          first = false;
        } else if (t.kind() == ExprKind::Negate) {
          out += " - " + wrap(t.args()[0], kPrecProduct);
        } else {
          out += " + " + wrap(t, kPrecProduct);
        }
      }
      return {out, kPrecSum};
    }
    case ExprKind::Product: {
      std::string out;
      bool first = true;
      for (const auto& f : e.args()) {
        out += first ? wrap(f, kPrecUnary) : "*" + wrap(f, kPrecPower);
        first = false;
      }
      return {out, kPrecProduct};
    }
    case ExprKind::Quotient:
      return {wrap(e.args()[0], kPrecProduct) + "/" + wrap(e.args()[1], kPrecPower), kPrecProduct};
    case ExprKind::Power:
      return {wrap(e.args()[0], kPrecAtom) + "^" + std::to_string(e.exponent()), kPrecPower};
    case ExprKind::Sin:
      return {"sin(" + render(e.args()[0]).first + ")", kPrecAtom};
    case ExprKind::Cos:
      return {"cos(" + render(e.args()[0]).first + ")", kPrecAtom};
    case ExprKind::Exp:
      return {"exp(" + render(e.args()[0]).first + ")", kPrecAtom};
  }
  return {"0", kPrecAtom};
}

}  // namespace

std::string Expr::to_string() const { return render(*this).first; }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr parse_all() {
    Expr e = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expression() {
    Expr left = term();
    for (;;) {
      if (accept('+')) {
        left = Expr::raw_sum({left, term()});
      } else if (accept('-')) {
        left = Expr::raw_sum({left, Expr::raw_negate(term())});
      } else {
        return left;
      }
    }
  }

  Expr term() {
    Expr left = unary();
    for (;;) {
      if (accept('*')) {
        left = Expr::raw_product({left, unary()});
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr den = unary();
        if (den.is_zero()) throw ParseError("division by literal zero", at);
        left = Expr::raw_quotient(left, den);
      } else {
        return left;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::raw_negate(unary());
    return power();
  }

  Expr power() {
    Expr b = base();
    if (accept('^')) {
      skip_space();
      bool negative = false;
      if (pos_ < text_.size() && text_[pos_] == '-') {
        negative = true;
        ++pos_;
      }
      skip_space();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      long long value = std::stoll(std::string(text_.substr(start, pos_ - start)));
      if (value > 1000) fail("exponent too large");
      int e = static_cast<int>(value);
      b = Expr::raw_power(b, negative ? -e : e);
    }
    return b;
  }

  Expr base() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      expect(')');
      return e;
    }
    if (c == 'x' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      std::size_t start = pos_;
      ++pos_;
      std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      long long index = std::stoll(std::string(text_.substr(digits, pos_ - digits)));
      if (index >= dim_) throw ParseError("variable x" + std::to_string(index) + " out of range", start);
      return Expr::variable(static_cast<int>(index));
    }
    for (auto [name, kind] : {std::pair{"sin", ExprKind::Sin}, std::pair{"cos", ExprKind::Cos},
                              std::pair{"exp", ExprKind::Exp}}) {
      std::string_view n(name);
      if (text_.substr(pos_, n.size()) == n) {
        pos_ += n.size();
        expect('(');
        Expr arg = expression();
        expect(')');
        return Expr::raw_function(kind, arg);
      }
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    bool is_real = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      is_real = true;
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        is_real = true;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string literal(text_.substr(start, pos_ - start));
    if (literal == ".") throw ParseError("malformed number", start);
    if (!is_real && literal.size() <= 18) return Expr(static_cast<std::int64_t>(std::stoll(literal)));
    return Expr::real(std::stod(literal));
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int dim) {
  if (dim < 1) throw std::invalid_argument("parse: dimension must be >= 1");
  return Parser(text, dim).parse_all();
}

}  // namespace srlab
