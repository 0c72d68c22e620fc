#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <random>
#include <sstream>

#include "btq/errors.hpp"
#include "btq/fock.hpp"
#include "btq/toeplitz.hpp"

using namespace btq;

namespace {

SpectralSubspace solve(const LatticeBundle& b, int expected) {
  ClusterOptions o;
  o.expected_dim = expected;
  o.vol_weight = b.h() * b.h();
  return lowest_cluster(renormalized_laplacian(b), o);
}

struct Fixture {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  LatticeBundle b;
  SpectralSubspace s;
  Fixture(int p = 8, int M = 16) : b(build_links(m, p, M)), s(solve(b, p)) {}
};

Eigen::MatrixXcd random_mat(int r, int c, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Eigen::MatrixXcd a(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

}  // namespace

TEST_CASE("assembly: constants compress to multiples of the identity") {
  Fixture fx;
  ToeplitzMatrix t1 = toeplitz_assemble(fx.s, fx.b, sym_one());
  CHECK((t1.m - Eigen::MatrixXcd::Identity(t1.dim(), t1.dim())).cwiseAbs().maxCoeff() < 1e-12);
  ToeplitzMatrix tc = toeplitz_assemble(fx.s, fx.b, sym_const(-2.5));
  CHECK((tc.m + 2.5 * Eigen::MatrixXcd::Identity(tc.dim(), tc.dim())).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("assembly: self-adjointness, linearity, norm contraction") {
  Fixture fx;
  Symbol f = sym_cos_x(1), g = sym_sin_y(2);
  ToeplitzMatrix tf = toeplitz_assemble(fx.s, fx.b, f);
  ToeplitzMatrix tg = toeplitz_assemble(fx.s, fx.b, g);
  CHECK((tf.m - tf.m.adjoint()).cwiseAbs().maxCoeff() < 1e-10);  // real symbol

  ToeplitzMatrix tsum = toeplitz_assemble(fx.s, fx.b, 2.0 * f + 3.0 * g);
  CHECK((tsum.m - 2.0 * tf.m - 3.0 * tg.m).cwiseAbs().maxCoeff() < 1e-10);

  CHECK(op_norm(tf) <= f.sup_abs() + 1e-8);
  CHECK(op_norm(tg) <= g.sup_abs() + 1e-8);

  // T_{conj f} = T_f^* for a complex symbol.
  Symbol cplx_sym = sym_cos_x(1) + sym_sin_x(1) * Symbol::eval_only(
      "i", [](double, double) { return cplx(0, 1); }, false);
  ToeplitzMatrix tc = toeplitz_assemble(fx.s, fx.b, cplx_sym);
  Symbol conj_sym = sym_cos_x(1) + sym_sin_x(1) * Symbol::eval_only(
      "-i", [](double, double) { return cplx(0, -1); }, false);
  ToeplitzMatrix tcc = toeplitz_assemble(fx.s, fx.b, conj_sym);
  CHECK((tc.m.adjoint() - tcc.m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("op_norm: identity, rank-1, dense SVD oracle") {
  CHECK(op_norm(Eigen::MatrixXcd::Identity(7, 7)) == doctest::Approx(1.0).epsilon(1e-10));

  Eigen::MatrixXcd u = random_mat(12, 1, 1), v = random_mat(12, 1, 2);
  Eigen::MatrixXcd rank1 = u * v.adjoint();
  CHECK(op_norm(rank1) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-9));

  for (unsigned seed = 10; seed < 14; ++seed) {
    Eigen::MatrixXcd a = random_mat(30, 30, seed);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    CHECK(op_norm(a) == doctest::Approx(svd.singularValues()[0]).epsilon(1e-8));
  }
}

TEST_CASE("weighted norm: alpha=0 equals op_norm, diagonal invariance, overflow") {
  Fixture fx;
  Symbol f = sym_cos_x(1);
  ToeplitzMatrix tf = toeplitz_assemble(fx.s, fx.b, f);
  double cap = 0.5 * std::sqrt(mu0(fx.m) * fx.b.p);
  Eigen::Vector2d y{0.5, 0.5};

  double w0 = weighted_norm(fx.s, fx.b, tf.m, 0.0, y, cap);
  // At alpha = 0 the conjugation is trivial, so this is the norm of P f P on
  // the full space, which equals the norm of the compression.
  CHECK(w0 == doctest::Approx(op_norm(tf)).epsilon(1e-8));

  CHECK_THROWS_AS(weighted_norm(fx.s, fx.b, tf.m, 2 * cap, y, cap), Error);

  // Diagonal kernels commute with the weights.
  Eigen::Index n = fx.b.dim();
  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i, i) = cplx(std::sin(0.1 * i), 0);
  double wk = weighted_norm_kernel(diag, fx.b, 1.5, y);
  double wk0 = weighted_norm_kernel(diag, fx.b, 0.0, y);
  CHECK(wk == doctest::Approx(wk0).epsilon(1e-10));

  Eigen::MatrixXcd kern = random_mat(int(n), int(n), 5);
  CHECK_THROWS_AS(weighted_norm_kernel(kern, fx.b, 1e4, y), WeightOverflow);
}

TEST_CASE("weighted norm grows with |alpha| on a displaced rank-1 kernel") {
  Fixture fx(4, 16);
  Eigen::Index n = fx.b.dim();
  // Positive rank-1 kernel concentrated away from y: conjugation is then
  // genuinely unbalanced and the norm must not decrease in |alpha|.
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n);
  u[fx.b.node(2, 2)] = 1.0;
  u[fx.b.node(10, 10)] = 1.0;
  Eigen::MatrixXcd kern = u * u.adjoint();
  Eigen::Vector2d y{0.0, 0.0};
  double prev = 0.0;
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    double w = weighted_norm_kernel(kern, fx.b, alpha, y);
    CHECK(w >= prev * (1 - 1e-12));
    prev = w;
  }
}

TEST_CASE("schur bound: identity kernel and majorization") {
  Fixture fx(2, 12);
  double h = fx.b.h();
  Eigen::Index n = fx.b.dim();
  Eigen::MatrixXcd ident_kernel = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) ident_kernel(i, i) = 1.0 / (h * h);
  CHECK(schur_bound(ident_kernel, h) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937 rng(31);
  for (int it = 0; it < 20; ++it) {
    Eigen::MatrixXcd low = random_mat(int(n), 3, 100 + it) * random_mat(3, int(n), 200 + it);
    CHECK(schur_bound(low, h) >= op_norm(Eigen::MatrixXcd((h * h) * low)) - 1e-9);
  }

  // Bergman projector kernel: norm is exactly 1, the Schur bound overshoots
  // but stays within a factor 10.
  Fixture f8(8, 16);
  Eigen::MatrixXcd proj = f8.s.basis * f8.s.basis.adjoint();
  double sb = schur_bound(proj, f8.b.h());
  CHECK(sb >= 1.0 - 1e-9);
  CHECK(sb <= 10.0);
}

TEST_CASE("product defect: constants vanish") {
  Fixture fx;
  CHECK(product_defect(fx.s, fx.b, sym_const(3.0), sym_cos_x(1)) < 1e-10);
  CHECK(product_defect(fx.s, fx.b, sym_sin_y(1), sym_const(-1.0)) < 1e-10);
}

TEST_CASE("fock oracle: product defect of |z|^2 against the closed forms") {
  FockTruncation t{4, 1.0, 32};
  Eigen::MatrixXcd ta = fock_toeplitz_exact(t, FockSym::AbsZ2);
  // T_{|z|^4} has the closed-form diagonal (2/b)^2 (k+1)(k+2).
  Eigen::MatrixXcd t4 = Eigen::MatrixXcd::Zero(t.dim(), t.dim());
  for (int k = 0; k < t.dim(); ++k)
    t4(k, k) = std::pow(2.0 / t.b(), 2) * (k + 1) * (k + 2);
  Eigen::MatrixXcd q4 = fock_toeplitz_quadrature(t, sym_abs_z2() * sym_abs_z2());
  CHECK(trim_edge(q4 - t4, 2).cwiseAbs().maxCoeff() < 1e-10);

  // Defect is diagonal with entries -(2/b)^2 (k+1); oracle vs assembled path.
  Eigen::MatrixXcd defect = ta * ta - t4;
  for (int k = 0; k + 2 < t.dim(); ++k)
    CHECK(defect(k, k).real() ==
          doctest::Approx(-std::pow(2.0 / t.b(), 2) * (k + 1)).epsilon(1e-10));
}

TEST_CASE("fock oracle: commutator of x and y matches the ladder value") {
  FockTruncation t{4, 1.0, 32};
  SymplecticModel plane = SymplecticModel::plane(1.0);
  Symbol bracket = poisson_bracket_symbol(plane, sym_coord_x(), sym_coord_y());
  Eigen::MatrixXcd tx = fock_toeplitz_exact(t, FockSym::X);
  Eigen::MatrixXcd ty = fock_toeplitz_exact(t, FockSym::Y);
  Eigen::MatrixXcd tb = fock_toeplitz_quadrature(t, bracket);
  Eigen::MatrixXcd defect = tx * ty - ty * tx - cplx(0, 1) / double(t.p) * tb;
  CHECK(trim_edge(defect, 2).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("symbol recovery: identity, linearity") {
  Fixture fx;
  ToeplitzMatrix t1 = toeplitz_assemble(fx.s, fx.b, sym_one());
  Eigen::VectorXd r1 = symbol_recover(t1, fx.s, fx.b);
  CHECK((r1.array() - 1.0).abs().maxCoeff() < 1e-10);

  Symbol f = sym_cos_x(1), g = sym_sin_y(1);
  ToeplitzMatrix tf = toeplitz_assemble(fx.s, fx.b, f);
  ToeplitzMatrix tg = toeplitz_assemble(fx.s, fx.b, g);
  ToeplitzMatrix tfg = toeplitz_assemble(fx.s, fx.b, f + g);
  Eigen::VectorXd sum = symbol_recover(tf, fx.s, fx.b) + symbol_recover(tg, fx.s, fx.b);
  Eigen::VectorXd direct = symbol_recover(tfg, fx.s, fx.b);
  CHECK((sum - direct).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("matrix symbols: assembly, rank guard, ordering sensitivity") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  LatticeBundle b = build_links(m, 8, 16, 2);
  SpectralSubspace s = solve(b, 16);
  auto [f, g] = builtin_matrix_pair();

  CHECK_THROWS_AS(toeplitz_assemble(solve(build_links(m, 8, 16, 1), 8),
                                    build_links(m, 8, 16, 1), f),
                  RankMismatch);

  ToeplitzMatrix tf = toeplitz_assemble(s, b, f);
  CHECK((tf.m - tf.m.adjoint()).cwiseAbs().maxCoeff() < 1e-10);  // hermitian-valued pair
  CHECK(op_norm(tf) <= f.sup_norm() + 1e-8);

  ToeplitzMatrix tfg = toeplitz_assemble(s, b, f * g);
  ToeplitzMatrix tgf = toeplitz_assemble(s, b, g * f);
  CHECK(op_norm(Eigen::MatrixXcd(tfg.m - tgf.m)) > 0.1);  // ordering floor

  double dfg = product_defect(s, b, f, g);
  double dgf = product_defect(s, b, g, f);
  CHECK(dfg < 1.0);
  CHECK(dgf < 1.0);
}

TEST_CASE("series defect: exact truncations and the alpha=0 collapse") {
  Fixture fx;
  Symbol f = sym_cos_x(1), g = sym_sin_y(1);
  ToeplitzMatrix tf = toeplitz_assemble(fx.s, fx.b, f);
  double cap = 0.5 * std::sqrt(mu0(fx.m) * fx.b.p);
  std::vector<Eigen::Vector2d> ys = {{0.5, 0.5}, {0.25, 0.75}};

  // T_p = T_{g0,p} with K = 0 vanishes identically.
  double z = series_defect(fx.s, fx.b, tf.m, {f}, fx.b.p, {0.0, 0.3 * cap}, ys, cap);
  CHECK(z < 1e-8);

  // With alpha = 0 only, the K = 0 series defect collapses to p * product_defect.
  ToeplitzMatrix tg = toeplitz_assemble(fx.s, fx.b, g);
  Eigen::MatrixXcd prod = tf.m * tg.m;
  double sd = series_defect(fx.s, fx.b, prod, {f * g}, fx.b.p, {0.0}, {ys[0]}, cap);
  CHECK(sd == doctest::Approx(fx.b.p * product_defect(fx.s, fx.b, f, g)).epsilon(1e-6));
}

TEST_CASE("toeplitz csv export") {
  ToeplitzMatrix t;
  t.m.resize(1, 1);
  t.m(0, 0) = cplx(0.25, -0.125);
  std::ostringstream os;
  t.write_csv(os);
  CHECK(os.str() == "row,col,re,im\n0,0,0.25,-0.125\n");
}
