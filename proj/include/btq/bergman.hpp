#pragma once

#include <iosfwd>
#include <vector>

#include "btq/eigensolve.hpp"
#include "btq/fit.hpp"
#include "btq/lattice.hpp"

namespace btq {

// Frequencies of the model Bergman kernel on the tangent space: the
// eigenvalue pairs a_1..a_n of |B_{x0}|.  Both implemented models have n = 1.
struct ModelKernelParams {
  std::vector<double> a;
};

// The explicit Gaussian kernel
//   P(Z,Z') = (2 pi)^{-n} prod a_j * exp(-1/4 sum a_k (|z_k|^2 + |z'_k|^2 - 2 z_k conj(z'_k)))
// with z_k = Z_{2k-1} + i Z_{2k}.
cplx model_kernel(const ModelKernelParams& params, const Eigen::VectorXd& Z,
                  const Eigen::VectorXd& Zp);

// A sampled kernel in normal coordinates around a base point: values K(Z,Z')
// for all pairs of offsets, in the h^{-2} kernel convention and with the
// radial-transport trivialization applied.
struct KernelField {
  Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
  std::vector<Eigen::Vector2d> offsets;
  Eigen::MatrixXcd values;  // values(i,j) = K(offsets[i], offsets[j])
  double h = 0.0;
  int p = 0;

  void write_csv(std::ostream& os) const;  // columns Z1, Z2, Z1p, Z2p, re, im
};

// Extracts the projector kernel around grid node (i0, j0) out to `radius`,
// visiting every `stride`-th grid point.  Section phases are rewritten into
// the normal-coordinate frame by parallel transport along straight segments
// from x0 (computed in closed form from the exact antiderivative of B; this
// equals grid-path transport corrected by the enclosed flux).  Throws
// RadiusTooLarge beyond the injectivity scale or when a transport path would
// cross the gauge seam.
KernelField projector_kernel(const SpectralSubspace& s, const LatticeBundle& b, int i0,
                             int j0, double radius, int stride = 1);

// Real-coefficient polynomial in the four variables (Z1, Z2, Z1', Z2').
struct Poly4 {
  struct Term {
    int e[4];
    double c;
  };
  std::vector<Term> terms;
  static Poly4 one() { return {{{{0, 0, 0, 0}, 1.0}}}; }
  double eval(const Eigen::VectorXd& Z, const Eigen::VectorXd& Zp) const;
};

// Weighted sup-residual of the kernel expansion truncated at order k:
//   sup | p^{-n} K kappa^(1/2) kappa^(1/2) - sum_r (Q_r P)(sqrt(p)Z, sqrt(p)Z') p^{-r/2} |
// divided by (1 + sqrt(p)|Z| + sqrt(p)|Z'|)^M_growth * exp(-C0 sqrt(p)|Z-Z'|).
// kappa is identically 1 on the flat models.  diagonal_only restricts the
// sample pairs to Z = Z'.
double expansion_residual(const KernelField& K, const ModelKernelParams& params,
                          const std::vector<Poly4>& Q, int p, int k, double C0,
                          int M_growth, bool diagonal_only = false);

struct DecayFit {
  double mu_hat = 0.0;
  double log_c = 0.0;
  double r2 = 0.0;
  int samples = 0;
};

// Least-squares fit of log|K(x,x')| against -sqrt(p) d(x,x') over node pairs
// with eps0 < d <= d_hi, dropping values below the noise floor 1e-13.
// K is an n x n operator kernel over the full grid (h^{-2} convention).
DecayFit decay_fit(const Eigen::MatrixXcd& K, const LatticeBundle& b, int p, double eps0,
                   double d_hi = std::numeric_limits<double>::infinity());

}  // namespace btq
