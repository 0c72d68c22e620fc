#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "btq/bergman.hpp"
#include "btq/errors.hpp"
#include "btq/fock.hpp"

using namespace btq;

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

SpectralSubspace solve(const LatticeBundle& b, int expected) {
  ClusterOptions o;
  o.expected_dim = expected;
  o.vol_weight = b.h() * b.h();
  return lowest_cluster(renormalized_laplacian(b), o);
}
}  // namespace

TEST_CASE("model kernel: normalization, symmetry, modulus identity") {
  ModelKernelParams mk{{kTwoPi}};
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  CHECK(model_kernel(mk, zero, zero).real() == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937 rng(3);
  std::normal_distribution<double> g(0, 0.3);
  double p00 = model_kernel(mk, zero, zero).real();
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd Z(2), Zp(2);
    Z << g(rng), g(rng);
    Zp << g(rng), g(rng);
    cplx a = model_kernel(mk, Z, Zp);
    cplx b = model_kernel(mk, Zp, Z);
    CHECK(std::abs(a - std::conj(b)) < 1e-12 * std::abs(a));
    // Diagonal modulus is constant.
    CHECK(std::abs(model_kernel(mk, Z, Z)) == doctest::Approx(p00).epsilon(1e-12));
    // |P(Z,Z')| = P(0,0) exp(-a/4 |z-z'|^2).
    double expect = p00 * std::exp(-kTwoPi / 4 * (Z - Zp).squaredNorm());
    CHECK(std::abs(a) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("model kernel reproduces itself under quadrature") {
  double a = kTwoPi;
  ModelKernelParams mk{{a}};
  double lim = 6.0 / std::sqrt(a);
  int nq = 120;
  double step = 2 * lim / nq;
  Eigen::VectorXd Z(2), Zp(2), W(2);
  Z << 0.21 / std::sqrt(a), -0.11 / std::sqrt(a);
  Zp << -0.4 / std::sqrt(a), 0.33 / std::sqrt(a);
  cplx acc(0, 0);
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j) {
      W << -lim + (i + 0.5) * step, -lim + (j + 0.5) * step;
      acc += model_kernel(mk, Z, W) * model_kernel(mk, W, Zp) * step * step;
    }
  cplx expect = model_kernel(mk, Z, Zp);
  CHECK(std::abs(acc - expect) < 1e-6);
}

TEST_CASE("projector kernel: trace, symmetry, idempotence") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  LatticeBundle b = build_links(m, 4, 16);
  SpectralSubspace s = solve(b, 4);

  // Trace of the full-grid kernel diagonal equals the rank.
  Eigen::MatrixXcd full = s.basis * s.basis.adjoint();
  double tr = 0;
  for (Eigen::Index i = 0; i < full.rows(); ++i) tr += full(i, i).real();
  CHECK(tr * b.h() * b.h() == doctest::Approx(s.dim()).epsilon(1e-8));

  KernelField K = projector_kernel(s, b, 8, 8, 0.3, 1);
  const size_t ns = K.offsets.size();
  for (size_t i = 0; i < ns; i += 7)
    for (size_t j = 0; j < ns; j += 5)
      CHECK(std::abs(K.values(i, j) - std::conj(K.values(j, i))) < 1e-10);

  // Kernel-level idempotence: h^2 sum_w K(x,w) K(w,x') = K(x,x').
  std::mt19937 rng(9);
  std::uniform_int_distribution<Eigen::Index> pick(0, full.rows() - 1);
  for (int it = 0; it < 10; ++it) {
    Eigen::Index i = pick(rng), j = pick(rng);
    cplx acc(0, 0);
    for (Eigen::Index w = 0; w < full.rows(); ++w) acc += full(i, w) * full(w, j);
    CHECK(std::abs(acc * b.h() * b.h() - full(i, j)) < 1e-8);
  }
}

TEST_CASE("projector kernel guards") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  LatticeBundle b = build_links(m, 2, 16);
  SpectralSubspace s = solve(b, 2);
  CHECK_THROWS_AS(projector_kernel(s, b, 8, 8, 0.7, 1), RadiusTooLarge);
  CHECK_THROWS_AS(projector_kernel(s, b, 1, 8, 0.3, 1), RadiusTooLarge);  // seam
}

TEST_CASE("diagonal density approaches B/(2 pi)") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  int p = 24, M = 32;
  LatticeBundle b = build_links(m, p, M);
  SpectralSubspace s = solve(b, p);
  double dens = s.basis.row(b.node(M / 2, M / 2)).squaredNorm() / p;
  CHECK(dens == doctest::Approx(m.B0 / kTwoPi).epsilon(0.05));
}

TEST_CASE("expansion residual: self-comparison vanishes") {
  // A kernel field generated from the model kernel itself must match the
  // k = 0 expansion to round-off.
  int p = 16;
  double a = kTwoPi;
  ModelKernelParams mk{{a}};
  KernelField K;
  K.p = p;
  K.h = 0.02;
  for (int i = -5; i <= 5; ++i)
    for (int j = -5; j <= 5; ++j) K.offsets.push_back({i * K.h, j * K.h});
  size_t ns = K.offsets.size();
  K.values.resize(ns, ns);
  for (size_t i = 0; i < ns; ++i)
    for (size_t j = 0; j < ns; ++j)
      K.values(i, j) =
          double(p) *
          model_kernel(mk, std::sqrt(double(p)) * K.offsets[i], std::sqrt(double(p)) * K.offsets[j]);
  double res = expansion_residual(K, mk, {Poly4::one()}, p, 0, 0.2 * std::sqrt(a), 4, false);
  CHECK(res < 1e-10);
  double res_diag = expansion_residual(K, mk, {Poly4::one()}, p, 0, 0.2 * std::sqrt(a), 4, true);
  CHECK(res_diag < 1e-10);
}

TEST_CASE("fock projector matches the model kernel for every p") {
  for (int p : {2, 8, 20}) {
    FockTruncation t{p, 1.0, 64};
    ModelKernelParams mk{{1.0}};
    KernelField K;
    K.p = p;
    K.h = 0.25 / std::sqrt(double(p));
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j) K.offsets.push_back({i * K.h, j * K.h});
    size_t ns = K.offsets.size();
    K.values.resize(ns, ns);
    for (size_t i = 0; i < ns; ++i)
      for (size_t j = 0; j < ns; ++j)
        K.values(i, j) = fock_bergman_kernel(t, {K.offsets[i][0], K.offsets[i][1]},
                                             {K.offsets[j][0], K.offsets[j][1]})
                             .closed;
    double res =
        expansion_residual(K, mk, {Poly4::one()}, p, 0, 0.2, 4, false);
    CHECK(res < 1e-10);
  }
}

TEST_CASE("poly4 evaluation") {
  Poly4 q;
  q.terms.push_back({{1, 0, 0, 0}, 2.0});   // 2 Z1
  q.terms.push_back({{0, 1, 0, 2}, -1.0});  // - Z2 Z2p^2
  Eigen::VectorXd Z(2), Zp(2);
  Z << 3, 5;
  Zp << 7, 2;
  CHECK(q.eval(Z, Zp) == doctest::Approx(2 * 3 - 5 * 4));
}

TEST_CASE("decay fit recovers a synthetic exponential exactly") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  LatticeBundle b = build_links(m, 4, 16);
  int n = static_cast<int>(b.nodes());
  Eigen::MatrixXcd K(n, n);
  double sp = std::sqrt(4.0);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i)
      for (int jj = 0; jj < 16; ++jj)
        for (int ii = 0; ii < 16; ++ii) {
          double d = geodesic_distance(m, b.coord(i, j), b.coord(ii, jj));
          K(b.node(i, j), b.node(ii, jj)) = 2.5 * std::exp(-3.0 * sp * d);
        }
  DecayFit f = decay_fit(K, b, 4, 0.15);
  CHECK(f.mu_hat == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(f.r2 > 0.999999);

  CHECK_THROWS_AS(decay_fit(K, b, 4, 0.05), Error);              // eps0 <= 2h
  CHECK_THROWS_AS(decay_fit(K, b, 4, 0.69, 0.7), InsufficientSamples);
}

TEST_CASE("projector kernel decays off-diagonal with positive rate") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  int p = 16, M = 24;
  LatticeBundle b = build_links(m, p, M);
  SpectralSubspace s = solve(b, p);
  Eigen::MatrixXcd full = s.basis * s.basis.adjoint();
  DecayFit f = decay_fit(full, b, p, std::max(0.7 / std::sqrt(double(p)), 2.5 * b.h()),
                         2.8 / std::sqrt(double(p)));
  CHECK(f.mu_hat > 0);
  CHECK(f.r2 >= 0.9);
}

TEST_CASE("kernel field csv export") {
  KernelField K;
  K.h = 0.1;
  K.p = 2;
  K.offsets = {{0.0, 0.0}, {0.1, 0.0}};
  K.values.resize(2, 2);
  K.values << cplx(1, 0), cplx(0.5, -0.25), cplx(0.5, 0.25), cplx(1, 0);
  std::ostringstream os;
  K.write_csv(os);
  CHECK(os.str().find("Z1,Z2,Z1p,Z2p,re,im") == 0);
  CHECK(os.str().find("0.5,-0.25") != std::string::npos);
}
