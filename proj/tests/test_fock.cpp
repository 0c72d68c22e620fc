#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btq/bergman.hpp"
#include "btq/errors.hpp"
#include "btq/fock.hpp"
#include "btq/model.hpp"

using namespace btq;

TEST_CASE("exact matrices: identity, ladder entries, moments") {
  FockTruncation t{4, 1.0, 32};
  Eigen::MatrixXcd one = fock_toeplitz_exact(t, FockSym::One);
  CHECK((one - Eigen::MatrixXcd::Identity(t.dim(), t.dim())).norm() == 0.0);

  Eigen::MatrixXcd z = fock_toeplitz_exact(t, FockSym::Z);
  CHECK(z(1, 0).real() == doctest::Approx(std::sqrt(2.0 / 4.0)));
  CHECK(z(5, 4).real() == doctest::Approx(std::sqrt(2.0 * 5 / 4.0)));

  Eigen::MatrixXcd a2 = fock_toeplitz_exact(t, FockSym::AbsZ2);
  CHECK(a2(0, 0).real() == doctest::Approx(0.5));  // 2(k+1)/(p B0) at k=0, p=4

  Eigen::MatrixXcd gs = fock_toeplitz_exact(t, FockSym::Gauss, 1.0);
  for (int k = 0; k < 6; ++k)
    CHECK(gs(k, k).real() == doctest::Approx(std::pow(4.0 / 6.0, k + 1)).epsilon(1e-14));
}

TEST_CASE("x and y are hermitian and satisfy the ladder commutator") {
  FockTruncation t{4, 1.0, 32};
  Eigen::MatrixXcd x = fock_toeplitz_exact(t, FockSym::X);
  Eigen::MatrixXcd y = fock_toeplitz_exact(t, FockSym::Y);
  CHECK((x - x.adjoint()).norm() < 1e-14);
  CHECK((y - y.adjoint()).norm() < 1e-14);

  Eigen::MatrixXcd zb = fock_toeplitz_exact(t, FockSym::Zbar);
  Eigen::MatrixXcd z = fock_toeplitz_exact(t, FockSym::Z);
  Eigen::MatrixXcd comm = zb * z - z * zb;
  Eigen::MatrixXcd target = (2.0 / t.b()) * Eigen::MatrixXcd::Identity(t.dim(), t.dim());
  CHECK(trim_edge(comm - target, 1).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("quadrature reproduces every library closed form") {
  FockTruncation t{4, 1.0, 24};
  struct Case {
    Symbol sym;
    Eigen::MatrixXcd exact;
  };
  std::vector<Case> cases;
  cases.push_back({sym_one(), fock_toeplitz_exact(t, FockSym::One)});
  cases.push_back({sym_z(), fock_toeplitz_exact(t, FockSym::Z)});
  cases.push_back({sym_zbar(), fock_toeplitz_exact(t, FockSym::Zbar)});
  cases.push_back({sym_abs_z2(), fock_toeplitz_exact(t, FockSym::AbsZ2)});
  cases.push_back({sym_coord_x(), fock_toeplitz_exact(t, FockSym::X)});
  cases.push_back({sym_coord_y(), fock_toeplitz_exact(t, FockSym::Y)});
  cases.push_back({sym_gauss(1.0), fock_toeplitz_exact(t, FockSym::Gauss, 1.0)});
  for (const auto& c : cases) {
    Eigen::MatrixXcd q = fock_toeplitz_quadrature(t, c.sym);
    CHECK((q - c.exact).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("bergman kernel: diagonal value, series agreement, truncation guard") {
  FockTruncation t{4, 1.0, 64};
  FockKernelValue kv0 = fock_bergman_kernel(t, 0.0, 0.0);
  CHECK(kv0.closed.real() == doctest::Approx(t.b() / (2 * M_PI)).epsilon(1e-14));
  CHECK(std::abs(kv0.closed - kv0.series) < 1e-14);

  double reach = 2.0 / std::sqrt(t.b());
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) {
      cplx z(reach * i / 2, reach * j / 2), zp(-reach * j / 2, reach * i / 2);
      FockKernelValue kv = fock_bergman_kernel(t, z, zp);
      CHECK(std::abs(kv.closed - kv.series) < 1e-10);
    }

  FockTruncation tiny{64, 1.0, 8};
  CHECK_THROWS_AS(fock_bergman_kernel(tiny, 3.0, 3.0), TruncationInsufficient);
}

TEST_CASE("fock kernel equals the model kernel after sqrt(p) rescaling") {
  FockTruncation t{9, 2.0, 64};
  ModelKernelParams mk{{t.B0}};
  double reach = 2.0 / std::sqrt(t.b());
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) {
      Eigen::VectorXd Z(2), Zp(2);
      Z << reach * i / 2, reach * j / 2;
      Zp << -reach * j / 2, reach * i / 2;
      cplx lhs = fock_bergman_kernel(t, {Z[0], Z[1]}, {Zp[0], Zp[1]}).closed / double(t.p);
      cplx rhs = model_kernel(mk, std::sqrt(double(t.p)) * Z, std::sqrt(double(t.p)) * Zp);
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("poisson sign calibration") {
  FockTruncation t{2, 1.0, 32};
  int sign = calibrate_poisson_sign(t);
  CHECK(sign == -1);  // frozen project convention
  CHECK(poisson_sign() == sign);

  // [T_x, T_y] is anti-hermitian with constant imaginary diagonal inside.
  Eigen::MatrixXcd x = fock_toeplitz_exact(t, FockSym::X);
  Eigen::MatrixXcd y = fock_toeplitz_exact(t, FockSym::Y);
  Eigen::MatrixXcd comm = x * y - y * x;
  CHECK((comm + comm.adjoint()).norm() < 1e-13);
  for (int k = 0; k + 2 < t.dim(); ++k) {
    CHECK(comm(k, k).real() == doctest::Approx(0.0));
    CHECK(comm(k, k).imag() == doctest::Approx(-1.0 / (t.p * t.B0)).epsilon(1e-12));
  }

  // Winning defect vanishes on interior indices.
  Eigen::MatrixXcd target = cplx(0, 1) / double(t.p) * (double(sign) / t.B0) *
                            Eigen::MatrixXcd::Identity(t.dim(), t.dim());
  CHECK(trim_edge(comm - target, 2).cwiseAbs().maxCoeff() < 1e-12);

  // Doubling p halves the interior commutator magnitude exactly.
  FockTruncation t2{4, 1.0, 32};
  Eigen::MatrixXcd x2 = fock_toeplitz_exact(t2, FockSym::X);
  Eigen::MatrixXcd y2 = fock_toeplitz_exact(t2, FockSym::Y);
  Eigen::MatrixXcd comm2 = x2 * y2 - y2 * x2;
  CHECK(comm2(3, 3).imag() * 2.0 == doctest::Approx(comm(3, 3).imag()).epsilon(1e-14));

  CHECK_THROWS_AS(calibrate_poisson_sign(FockTruncation{1, 1.0, 8}), Error);
}

TEST_CASE("interior boundedness and edge confinement") {
  FockTruncation t{4, 1.0, 48};
  // T_x is bounded by sup|x| on coherent scales; on the truncated matrix the
  // growth concentrates in the last indices, so trimming restores the ladder
  // identities.
  Eigen::MatrixXcd z = fock_toeplitz_exact(t, FockSym::Z);
  Eigen::MatrixXcd zb = fock_toeplitz_exact(t, FockSym::Zbar);
  Eigen::MatrixXcd comm = zb * z - z * zb;
  Eigen::MatrixXcd target = (2.0 / t.b()) * Eigen::MatrixXcd::Identity(t.dim(), t.dim());
  CHECK(trim_edge(comm - target, 1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gauss-laguerre rule integrates polynomials exactly") {
  Eigen::VectorXd u, w;
  gauss_laguerre(24, u, w);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-13));
  // int u^k exp(-u) = k!
  double m1 = (w.array() * u.array()).sum();
  double m3 = (w.array() * u.array().pow(3)).sum();
  CHECK(m1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m3 == doctest::Approx(6.0).epsilon(1e-12));
}
