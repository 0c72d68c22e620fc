#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btq/errors.hpp"
#include "btq/symbols.hpp"

using namespace btq;

TEST_CASE("built-in torus symbols are exactly periodic") {
  for (const Symbol& s : {sym_cos_x(1), sym_sin_x(3), sym_cos_y(2), sym_sin_y(1)}) {
    for (double x : {0.0, 0.31, 0.77})
      for (double y : {0.11, 0.5}) {
        CHECK(std::abs(s(x + 1.0, y) - s(x, y)) < 1e-12);
        CHECK(std::abs(s(x, y + 1.0) - s(x, y)) < 1e-12);
      }
  }
}

TEST_CASE("derivative propagation through sums and products") {
  Symbol s = 2.0 * sym_cos_x(1) * sym_sin_y(2) + sym_sin_x(1);
  double x = 0.3, y = 0.7, w = 2.0 * M_PI;
  double expect_dx = -2.0 * w * std::sin(w * x) * std::sin(2 * w * y) + w * std::cos(w * x);
  double expect_dy = 2.0 * std::cos(w * x) * 2 * w * std::cos(2 * w * y);
  CHECK(s.dx(x, y).real() == doctest::Approx(expect_dx).epsilon(1e-12));
  CHECK(s.dy(x, y).real() == doctest::Approx(expect_dy).epsilon(1e-12));
}

TEST_CASE("eval-only symbols refuse derivative calls") {
  Symbol s = Symbol::eval_only("blob", [](double, double) { return cplx(1, 0); }, true);
  CHECK_THROWS_AS(s.dx(0, 0), MissingDerivative);
  CHECK_FALSE(s.has_derivatives());
  CHECK((sym_one() * s).has_derivatives() == false);
}

TEST_CASE("plane symbols") {
  Symbol z = sym_z(), zb = sym_zbar(), a2 = sym_abs_z2();
  CHECK(z(1.0, 2.0) == cplx(1, 2));
  CHECK(zb(1.0, 2.0) == cplx(1, -2));
  CHECK(a2(3.0, 4.0).real() == doctest::Approx(25.0));
  CHECK_FALSE(z.real_valued());
  CHECK(a2.real_valued());
  Symbol gs = sym_gauss(0.5);
  CHECK(gs(1.0, 1.0).real() == doctest::Approx(std::exp(-1.0)));
  CHECK(gs.dx(1.0, 0.0).real() == doctest::Approx(-std::exp(-0.5)));
}

TEST_CASE("C_b metadata") {
  Symbol f = sym_cos_x(1);
  CHECK(f.sup_abs() == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(f.sup_grad() == doctest::Approx(2.0 * M_PI).epsilon(1e-2));
}

TEST_CASE("symbol parser round trips the grammar") {
  Symbol s = parse_symbol("cos(2pi*1*x)*sin(2pi*1*y) + 2*cos(2pi*3*y)");
  double x = 0.21, y = 0.57, w = 2.0 * M_PI;
  double expect = std::cos(w * x) * std::sin(w * y) + 2 * std::cos(3 * w * y);
  CHECK(s(x, y).real() == doctest::Approx(expect).epsilon(1e-13));
  CHECK(s.has_derivatives());

  CHECK(parse_symbol("absz2")(1.0, 1.0).real() == doctest::Approx(2.0));
  CHECK(parse_symbol("gauss(1.5)")(0.0, 0.0).real() == doctest::Approx(1.0));
  CHECK(parse_symbol("-0.5*one")(0.4, 0.4).real() == doctest::Approx(-0.5));

  CHECK_THROWS_AS(parse_symbol("cos(3pi*1*x)"), ParseError);
  CHECK_THROWS_AS(parse_symbol("frob(2)"), ParseError);
  CHECK_THROWS_AS(parse_symbol(""), ParseError);
}

TEST_CASE("matrix symbols evaluate and multiply pointwise") {
  auto [f, g] = builtin_matrix_pair();
  CHECK(f.rank() == 2);
  CHECK(f.hermitian_valued());
  CHECK(g.hermitian_valued());

  double x = 0.3, y = 0.8;
  Eigen::MatrixXcd fg = (f * g).eval(x, y);
  Eigen::MatrixXcd ref = f.eval(x, y) * g.eval(x, y);
  CHECK((fg - ref).norm() < 1e-13);
  // The pair genuinely fails to commute pointwise.
  CHECK((f.eval(x, y) * g.eval(x, y) - g.eval(x, y) * f.eval(x, y)).norm() > 0.1);
}

TEST_CASE("matrix symbol term shape is validated") {
  MatrixSymbol m("bad", 2);
  CHECK_THROWS_AS(m.add_term(Eigen::MatrixXcd::Identity(3, 3), sym_one()), RankMismatch);
}
