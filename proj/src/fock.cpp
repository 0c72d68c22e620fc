#include "btq/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "btq/errors.hpp"
#include "btq/model.hpp"

namespace btq {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

Eigen::MatrixXcd trim_edge(const Eigen::MatrixXcd& m, int edge) {
  if (edge <= 0) return m;
  Eigen::Index keep = std::max<Eigen::Index>(0, m.rows() - edge);
  return m.topLeftCorner(keep, keep);
}

Eigen::MatrixXcd fock_toeplitz_exact(const FockTruncation& t, FockSym sym, double c) {
  const int n = t.dim();
  const double b = t.b();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  switch (sym) {
    case FockSym::One:
      m.setIdentity();
      break;
    case FockSym::Z:
      for (int k = 0; k + 1 < n; ++k) m(k + 1, k) = std::sqrt(2.0 * (k + 1) / b);
      break;
    case FockSym::Zbar:
      m = fock_toeplitz_exact(t, FockSym::Z).adjoint();
      break;
    case FockSym::AbsZ2:
      for (int k = 0; k < n; ++k) m(k, k) = 2.0 * (k + 1) / b;
      break;
    case FockSym::X:
      m = 0.5 * (fock_toeplitz_exact(t, FockSym::Z) + fock_toeplitz_exact(t, FockSym::Zbar));
      break;
    case FockSym::Y:
      m = (fock_toeplitz_exact(t, FockSym::Z) - fock_toeplitz_exact(t, FockSym::Zbar)) /
          cplx(0, 2);
      break;
    case FockSym::Gauss:
      for (int k = 0; k < n; ++k) m(k, k) = std::pow(b / (b + 2.0 * c), k + 1);
      break;
  }
  return m;
}

void gauss_laguerre(int order, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  // Golub-Welsch on the Laguerre Jacobi matrix: diag 2k+1, offdiag k.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
  for (int k = 0; k < order; ++k) jac(k, k) = 2.0 * k + 1.0;
  for (int k = 1; k < order; ++k) {
    jac(k, k - 1) = k;
    jac(k - 1, k) = k;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success) throw NotConverged("gauss_laguerre eigensolve failed");
  nodes = es.eigenvalues();
  weights.resize(order);
  for (int k = 0; k < order; ++k) {
    double v0 = es.eigenvectors()(0, k);
    weights[k] = v0 * v0;  // total mass of exp(-u) is 1
  }
}

namespace {

// Generalized Gauss-Laguerre rule for the weight u^alpha exp(-u).  Weights
// come back as logs: the Golub-Welsch first components sit far below machine
// precision at the outer nodes, and only the product Gamma(alpha+1) v0^2
// against the 1/Gamma-sized normalization is well conditioned.
void gauss_laguerre_general(int order, double alpha, Eigen::VectorXd& nodes,
                            Eigen::VectorXd& logw) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
  for (int k = 0; k < order; ++k) jac(k, k) = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < order; ++k) {
    double off = std::sqrt(k * (k + alpha));
    jac(k, k - 1) = off;
    jac(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success) throw NotConverged("gauss_laguerre eigensolve failed");
  nodes = es.eigenvalues();
  logw.resize(order);
  for (int k = 0; k < order; ++k) {
    double v0 = std::abs(es.eigenvectors()(0, k));
    logw[k] = v0 > 0 ? std::lgamma(alpha + 1.0) + 2.0 * std::log(v0)
                     : -std::numeric_limits<double>::infinity();
  }
}

// One radial order of the matrix-element quadrature.  Entries are grouped by
// a = max(k,l): with the generalized rule for u^a exp(-u) the remaining
// radial factor A_m(r)/r^{|m|} is analytic in u for analytic symbols (the
// angular-m coefficient of f vanishes like r^{|m|}), so the rule converges
// spectrally; all large factors combine in logs.
Eigen::MatrixXcd quad_pass(const FockTruncation& t, const Symbol& f, int radial_order,
                           int angular_order) {
  const int n = t.dim();
  const double b = t.b();
  Eigen::VectorXd logn(n);
  for (int k = 0; k < n; ++k)
    logn[k] = 0.5 * (std::log(M_PI) + std::lgamma(k + 1.0) + (k + 1) * std::log(2.0 / b));

  // Phase table exp(-i m theta_a) for all needed orders.
  Eigen::MatrixXcd phases(2 * n - 1, angular_order);
  for (int mm = -(n - 1); mm <= n - 1; ++mm)
    for (int av = 0; av < angular_order; ++av)
      phases(mm + n - 1, av) = std::polar(1.0, -mm * kTwoPi * av / angular_order);

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd fv(angular_order);
  const double log2b = std::log(2.0 / b);
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd u, logw;
    gauss_laguerre_general(radial_order, double(a), u, logw);
    for (int q = 0; q < radial_order; ++q) {
      double r = std::sqrt(2.0 * u[q] / b);
      double logr = 0.5 * std::log(2.0 * u[q] / b);
      for (int av = 0; av < angular_order; ++av) {
        double th = kTwoPi * av / angular_order;
        fv[av] = f(r * std::cos(th), r * std::sin(th));
      }
      for (int mm = -a; mm <= a; ++mm) {
        // The (l,k) entry with l - k = mm and max(k,l) = a.
        int l = mm >= 0 ? a : a + mm;
        int k = mm >= 0 ? a - mm : a;
        cplx ang = (phases.row(mm + n - 1) * fv)(0, 0) / double(angular_order);
        double logmag =
            logw[q] + a * log2b - std::abs(mm) * logr - logn[k] - logn[l];
        m(l, k) += std::exp(logmag) * ang;
      }
    }
  }
  return kTwoPi / b * m;
}

}  // namespace

Eigen::MatrixXcd fock_toeplitz_quadrature(const FockTruncation& t, const Symbol& f,
                                          int radial_order, int angular_order) {
  Eigen::MatrixXcd a = quad_pass(t, f, radial_order, angular_order);
  Eigen::MatrixXcd b = quad_pass(t, f, radial_order + 16, angular_order);
  double diff = (a - b).cwiseAbs().maxCoeff();
  if (diff > 1e-9)
    throw QuadratureNotConverged("successive radial orders disagree by " +
                                 std::to_string(diff));
  return b;
}

FockKernelValue fock_bergman_kernel(const FockTruncation& t, cplx z, cplx zp) {
  const double b = t.b();
  cplx w = b * z * std::conj(zp) / 2.0;
  double aw = std::abs(w);
  // Gaussian tail of the exponential series relative to the diagonal scale.
  double log_tail = (t.K_max + 1) * std::log(std::max(aw, 1e-300)) -
                    std::lgamma(t.K_max + 2.0) + aw;
  if (aw > 0 && log_tail > std::log(1e-12))
    throw TruncationInsufficient("series tail bound exp(" + std::to_string(log_tail) +
                                 ") above 1e-12 for K_max=" + std::to_string(t.K_max));

  double damp = -b * (std::norm(z) + std::norm(zp)) / 4.0;
  FockKernelValue out;
  out.closed = b / kTwoPi * std::exp(w + damp);
  cplx term(1, 0), sum(1, 0);
  for (int k = 1; k <= t.K_max; ++k) {
    term *= w / double(k);
    sum += term;
  }
  out.series = b / kTwoPi * std::exp(damp) * sum;
  return out;
}

int calibrate_poisson_sign(const FockTruncation& t) {
  if (t.K_max < 16) throw Error("calibrate_poisson_sign needs K_max >= 16");
  Eigen::MatrixXcd tx = fock_toeplitz_exact(t, FockSym::X);
  Eigen::MatrixXcd ty = fock_toeplitz_exact(t, FockSym::Y);
  Eigen::MatrixXcd comm = tx * ty - ty * tx;
  auto defect = [&](int sign) {
    Eigen::MatrixXcd target = cplx(0, 1) / double(t.p) * (double(sign) / t.B0) *
                              Eigen::MatrixXcd::Identity(t.dim(), t.dim());
    return trim_edge(comm - target, 2).cwiseAbs().maxCoeff();
  };
  double dplus = defect(+1), dminus = defect(-1);
  double lo = std::min(dplus, dminus), hi = std::max(dplus, dminus);
  if (lo * 2.0 > hi)
    throw AmbiguousSign("defects " + std::to_string(dplus) + " / " + std::to_string(dminus));
  int sign = dminus < dplus ? -1 : +1;
  set_poisson_sign(sign);
  return sign;
}

}  // namespace btq
