#pragma once

#include <srlab/expr.hpp>
#include <srlab/random.hpp>

namespace srlab::fx {

// Random smooth expressions without poles: quotients only by 2 + sin/cos/x^2.
inline Expr random_expr(Rng& rng, int dim, int depth, bool polynomial = false) {
  std::uniform_int_distribution<int> pick(0, polynomial ? 3 : 7);
  std::uniform_int_distribution<int> var(0, dim - 1);
  std::uniform_int_distribution<int> small(-3, 3);
  if (depth <= 0) {
    if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) return Expr(small(rng));
    return Expr::variable(var(rng));
  }
  auto sub = [&] { return random_expr(rng, dim, depth - 1, polynomial); };
  switch (pick(rng)) {
    case 0: return Expr::raw_sum({sub(), sub()});
    case 1: return Expr::raw_product({sub(), sub()});
    case 2: return Expr::raw_negate(sub());
    case 3: return Expr::raw_power(sub(), std::uniform_int_distribution<int>(0, 3)(rng));
    case 4: return Expr::raw_function(ExprKind::Sin, sub());
    case 5: return Expr::raw_function(ExprKind::Cos, sub());
    case 6: return Expr::raw_function(ExprKind::Exp, Expr::raw_function(ExprKind::Sin, sub()));
    default:
      return Expr::raw_quotient(sub(), Expr::raw_sum({Expr(2), Expr::raw_function(ExprKind::Cos, sub())}));
  }
}

}  // namespace srlab::fx
