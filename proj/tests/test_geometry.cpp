#include <gtest/gtest.h>

#include <cmath>
#include <srlab/geometry.hpp>

#include "fixtures.hpp"
#include "random_expr.hpp"

using namespace srlab;
using srlab::fx::max_abs;

namespace {

// Bracket from central finite differences of the coefficient functions.
Eigen::VectorXd fd_bracket(const VectorField& X, const VectorField& Y, const Point& p) {
  const int m = X.dim();
  const double h = 1e-5;
  auto jac = [&](const VectorField& Z) {
    Eigen::MatrixXd J(m, m);
    for (int i = 0; i < m; ++i) {
      Point a = p, b = p;
      a[static_cast<std::size_t>(i)] += h;
      b[static_cast<std::size_t>(i)] -= h;
      J.col(i) = (Z.evaluate(a) - Z.evaluate(b)) / (2 * h);
    }
    return J;
  };
  return jac(Y) * X.evaluate(p) - jac(X) * Y.evaluate(p);
}

VectorField random_polynomial_field(Rng& rng, int dim) {
  std::vector<Expr> c;
  for (int j = 0; j < dim; ++j) c.push_back(fx::random_expr(rng, dim, 2, true));
  return VectorField(std::move(c));
}

}  // namespace

TEST(LieBracket, Heisenberg) {
  auto s = fx::heisenberg();
  VectorField b = lie_bracket(s.horizontal[0], s.horizontal[1]);
  EXPECT_TRUE(b[0].is_zero());
  EXPECT_TRUE(b[1].is_zero());
  EXPECT_TRUE(b[2].is_one());
}

TEST(LieBracket, SelfBracketVanishes) {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    VectorField X = random_polynomial_field(rng, 3);
    VectorField b = lie_bracket(X, X);
    Point p = random_point(rng, std::vector<double>{1, 1, 1});
    EXPECT_LT(max_abs(b.evaluate(p)), 1e-12);
  }
}

TEST(LieBracket, ContactTorus) {
  auto s = fx::contact3torus();
  VectorField b = lie_bracket(s.horizontal[1], s.horizontal[0]);
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    Point p = random_point(rng, s.periods);
    Eigen::Vector3d expect(std::cos(p[2]), std::sin(p[2]), 0.0);
    EXPECT_LT((b.evaluate(p) - expect).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(LieBracket, MatchesFiniteDifferences) {
  Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    VectorField X = random_polynomial_field(rng, 3);
    VectorField Y = random_polynomial_field(rng, 3);
    Point p = random_point(rng, std::vector<double>{1, 1, 1});
    Eigen::VectorXd exact = lie_bracket(X, Y).evaluate(p);
    EXPECT_LT(max_abs(exact - fd_bracket(X, Y, p)), 1e-6 * std::max(1.0, max_abs(exact)));
  }
}

TEST(LieBracket, JacobiIdentity) {
  Rng rng(29);
  for (int t = 0; t < 20; ++t) {
    VectorField X = random_polynomial_field(rng, 3);
    VectorField Y = random_polynomial_field(rng, 3);
    VectorField Z = random_polynomial_field(rng, 3);
    VectorField j = lie_bracket(lie_bracket(X, Y), Z) + lie_bracket(lie_bracket(Y, Z), X) +
                    lie_bracket(lie_bracket(Z, X), Y);
    Point p = random_point(rng, std::vector<double>{1, 1, 1});
    EXPECT_LT(max_abs(j.evaluate(p)), 1e-10);
  }
}

TEST(StructureConstants, Heisenberg) {
  auto s = fx::heisenberg();
  Rng rng(31);
  for (int t = 0; t < 5; ++t) {
    auto d = structure_constants(s, random_point(rng, s.periods));
    EXPECT_NEAR(d.vertical(0, 1, 0), 1.0, 1e-14);
    EXPECT_NEAR(d.vertical(1, 0, 0), -1.0, 1e-14);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 2; ++a) EXPECT_NEAR(d.horizontal(i, j, a), 0.0, 1e-14);
  }
}

TEST(StructureConstants, CarnotGradingKillsHorizontalPart) {
  auto s = fx::carnot_step2();
  Rng rng(37);
  for (int t = 0; t < 10; ++t) {
    auto d = structure_constants(s, random_point(rng, s.periods));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 3; ++a) EXPECT_NEAR(d.horizontal(i, j, a), 0.0, 1e-13);
  }
}

TEST(StructureConstants, ContactTorusAgainstFiniteDifferenceOracle) {
  auto s = fx::contact3torus();
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    Point p = random_point(rng, s.periods);
    auto d = structure_constants(s, p);
    EXPECT_NEAR(d.vertical(0, 1, 0), -1.0, 1e-13);
    // Independent route: finite-difference bracket expanded with the explicit inverse.
    Eigen::Matrix3d F = frame_matrix(s.frame(), p);
    Eigen::Vector3d c = F.inverse() * fd_bracket(s.horizontal[0], s.horizontal[1], p);
    EXPECT_NEAR(c[2], d.vertical(0, 1, 0), 1e-8);
    EXPECT_NEAR(c[0], d.horizontal(0, 1, 0), 1e-8);
    EXPECT_NEAR(c[1], d.horizontal(0, 1, 1), 1e-8);
  }
}

TEST(StructureConstants, AntisymmetryAndReconstruction) {
  Rng rng(43);
  for (const auto& s : {fx::contact3torus(), fx::engel(), fx::tilted_heisenberg(),
                        fx::carnot_step2(), fx::martinet()}) {
    auto frame = s.frame();
    for (int t = 0; t < 10; ++t) {
      Point p = random_point(rng, s.periods);
      auto d = structure_constants(s, p);
      Eigen::MatrixXd F = frame_matrix(frame, p);
      for (int u = 0; u < s.dim; ++u) {
        for (int v = 0; v < s.dim; ++v) {
          Eigen::VectorXd combo = Eigen::VectorXd::Zero(s.dim);
          for (int w = 0; w < s.dim; ++w) {
            EXPECT_LE(std::abs(d(u, v, w) + d(v, u, w)), 1e-12);
            combo += d(u, v, w) * F.col(w);
          }
          Eigen::VectorXd b = lie_bracket(frame[static_cast<std::size_t>(u)], frame[static_cast<std::size_t>(v)]).evaluate(p);
          EXPECT_LT(max_abs(combo - b), 1e-10) << s.name;
        }
      }
    }
  }
}

TEST(FrameAlgebra, SymbolicConstantsMatchNumeric) {
  Rng rng(47);
  for (const auto& s : {fx::contact3torus(), fx::engel(), fx::tilted_heisenberg(),
                        fx::carnot_step2()}) {
    FrameAlgebra alg(s);
    for (int t = 0; t < 5; ++t) {
      Point p = random_point(rng, s.periods);
      auto d = alg.at(p);
      Eigen::MatrixXd Finv = frame_matrix(s.frame(), p).inverse();
      for (int w = 0; w < s.dim; ++w)
        for (int j = 0; j < s.dim; ++j) EXPECT_NEAR(alg.coframe(w, j).evaluate(p), Finv(w, j), 1e-12);
      for (int u = 0; u < s.dim; ++u)
        for (int v = 0; v < s.dim; ++v)
          for (int w = 0; w < s.dim; ++w) EXPECT_NEAR(alg.constant(u, v, w).evaluate(p), d(u, v, w), 1e-12) << s.name;
    }
  }
}

TEST(Flag, Heisenberg) {
  auto s = fx::heisenberg();
  auto r = hormander_flag(s, Point{0, 0, 0}, 3);
  EXPECT_EQ(r.dims, (std::vector<int>{2, 3}));
  ASSERT_TRUE(r.degree);
  EXPECT_EQ(*r.degree, 2);
  EXPECT_EQ(hausdorff_dimension(r.dims, 3), 4);
}

TEST(Flag, IntegrableNeverGenerates) {
  auto s = fx::integrable();
  auto r = hormander_flag(s, Point{0.3, 0.2, 0.1}, 4);
  EXPECT_EQ(r.dims, (std::vector<int>{2, 2, 2, 2}));
  EXPECT_FALSE(r.degree);
  EXPECT_THROW(hausdorff_dimension(r.dims, 3), std::invalid_argument);
}

TEST(Flag, Engel) {
  // By hand: [X1,X2] = d2, [X2,[X1,X2]] = -d3.
  auto s = fx::engel();
  Rng rng(53);
  for (int t = 0; t < 10; ++t) {
    auto r = hormander_flag(s, random_point(rng, s.periods), 4);
    EXPECT_EQ(r.dims, (std::vector<int>{2, 3, 4}));
    ASSERT_TRUE(r.degree);
    EXPECT_EQ(*r.degree, 3);
    EXPECT_EQ(hausdorff_dimension(r.dims, 4), 7);
  }
}

TEST(Flag, ContactTorusAndCarnot) {
  auto c = fx::contact3torus();
  EXPECT_EQ(hausdorff_dimension(hormander_flag(c, Point{1, 2, 3}, 3).dims, 3), 4);
  auto g = fx::carnot_step2();
  auto r = hormander_flag(g, Point(6, 0.4), 3);
  EXPECT_EQ(r.dims, (std::vector<int>{3, 6}));
  EXPECT_EQ(hausdorff_dimension(r.dims, 6), 9);
}

TEST(Flag, HausdorffFormula) {
  EXPECT_EQ(hausdorff_dimension({2, 3}, 3), 4);
  EXPECT_EQ(hausdorff_dimension({2, 3, 4}, 4), 7);
  EXPECT_EQ(hausdorff_dimension({3}, 3), 3);
  EXPECT_THROW(hausdorff_dimension({3, 2, 4}, 4), std::invalid_argument);
}

TEST(Regularity, Fixtures) {
  auto h = fx::heisenberg();
  auto lat = lattice(h.periods, 5);
  EXPECT_EQ(lat.size(), 125u);
  EXPECT_TRUE(is_regular(h, lat, 3).regular);

  auto c = fx::contact3torus();
  EXPECT_TRUE(is_regular(c, lattice(c.periods, 5), 3).regular);

  // Degree 3 on x0 = 0, degree 2 elsewhere.
  auto mt = fx::martinet();
  auto rep = is_regular(mt, lattice(mt.periods, 5), 4);
  EXPECT_FALSE(rep.regular);
  EXPECT_EQ(*hormander_flag(mt, Point{0, 0.5, 0.5}, 4).degree, 3);
  EXPECT_EQ(*hormander_flag(mt, Point{0.4, 0.5, 0.5}, 4).degree, 2);
}

TEST(Fatness, Heisenberg) {
  auto s = fx::heisenberg();
  auto d = structure_constants(s, Point{0, 0, 0});
  Eigen::MatrixXd M = d.vertical_matrix(0);
  EXPECT_NEAR(M(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(M(1, 0), -1.0, 1e-15);
  EXPECT_NEAR(M.determinant(), 1.0, 1e-15);
  Rng rng(59);
  auto r = is_fat(d, 64, rng);
  EXPECT_TRUE(r.fat);
  EXPECT_FALSE(r.witness);
}

TEST(Fatness, EngelHasWitness) {
  auto s = fx::engel();
  Rng rng(61);
  auto r = is_fat(s, Point{0.1, 0.2, 0.3, 0.4}, 64, rng);
  EXPECT_FALSE(r.fat);
  ASSERT_TRUE(r.witness);
  // Determinant oracle: M(lambda) = lambda_0 [[0,1],[-1,0]] since C^1 = 0.
  const auto& w = *r.witness;
  EXPECT_NEAR(w[0], 0.0, 1e-12);
}

TEST(Fatness, ContactTorusFrameIndependent) {
  auto s = fx::contact3torus();
  Rng rng(67);
  for (int t = 0; t < 100; ++t) {
    Point p = random_point(rng, s.periods);
    EXPECT_TRUE(is_fat(s, p, 16, rng).fat);
    double th = uniform(rng, 0, 6.28);
    auto rot = s;
    Expr c = Expr::real(std::cos(th));
    Expr sn = Expr::real(std::sin(th));
    rot.horizontal[0] = c * s.horizontal[0] + sn * s.horizontal[1];
    rot.horizontal[1] = (Expr(0) - sn) * s.horizontal[0] + c * s.horizontal[1];
    EXPECT_TRUE(is_fat(rot, p, 16, rng).fat);
  }
}

TEST(Fatness, ImpliesStepTwo) {
  Rng rng(71);
  for (const auto& s : {fx::heisenberg(), fx::contact3torus(), fx::carnot_step2(),
                        fx::engel(), fx::martinet(), fx::integrable(), fx::trivial()}) {
    for (const auto& p : random_points(s.periods, 5, rng)) {
      if (!is_fat(s, p, 32, rng).fat) continue;
      auto r = hormander_flag(s, p, 3);
      ASSERT_TRUE(r.degree) << s.name;
      EXPECT_LE(*r.degree, 2) << s.name;
    }
  }
}

TEST(Cartan, HeisenbergDx2) {
  auto s = fx::heisenberg();
  std::vector<Expr> omega = {Expr(0), Expr(0), Expr(1)};
  Rng rng(73);
  for (int t = 0; t < 10; ++t) {
    EXPECT_LT(cartan_residual(omega, s.horizontal[0], s.horizontal[1], random_point(rng, s.periods)), 1e-12);
  }
}

TEST(Cartan, ExactFormsAndRandomPolynomials) {
  Rng rng(79);
  for (int t = 0; t < 20; ++t) {
    Expr f = fx::random_expr(rng, 3, 3, true);
    std::vector<Expr> df = {differentiate(f, 0), differentiate(f, 1), differentiate(f, 2)};
    VectorField X = random_polynomial_field(rng, 3);
    VectorField Y = random_polynomial_field(rng, 3);
    Point p = random_point(rng, std::vector<double>{1, 1, 1});
    EXPECT_LT(cartan_residual(df, X, Y, p), 1e-12 * std::max(1.0, max_abs(X.evaluate(p))));

    std::vector<Expr> omega = {fx::random_expr(rng, 3, 2, true), fx::random_expr(rng, 3, 2, true),
                               fx::random_expr(rng, 3, 2, true)};
    EXPECT_LT(cartan_residual(omega, X, Y, p), 1e-10);
  }
}

TEST(Validate, Errors) {
  auto s = fx::heisenberg();
  EXPECT_NO_THROW(s.validate());
  auto bad = s;
  bad.complement.clear();
  EXPECT_THROW(bad.validate(), StructureError);
  bad = s;
  bad.complement[0] = VectorField::parse({"1", "0", "0"}, 3);
  EXPECT_THROW(bad.validate(), StructureError);
  bad = s;
  bad.periods = {1, 1};
  EXPECT_THROW(bad.validate(), StructureError);
  bad = s;
  bad.horizontal.push_back(bad.complement[0]);
  EXPECT_THROW(bad.validate(), StructureError);
  EXPECT_THROW(VectorField::parse({"1", "0"}, 3), StructureError);
}
