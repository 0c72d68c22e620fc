#pragma once

#include <Eigen/Dense>

#include "btq/symbols.hpp"

namespace btq {

// Truncated Segal-Bargmann space on the plane with constant field B0: basis
// e_k proportional to z^k, k = 0..K_max, orthonormal under the weight
// exp(-p*B0*|z|^2/2) with <z^k, z^k> = pi * k! * (2/(p*B0))^{k+1}.
//
// Convention lock: the prequantization i R^L = omega with omega = B0 dx^dy
// corresponds to exactly this weight; every factor of 2 in the module follows
// from it and is pinned by the kernel identity test against model_kernel.
struct FockTruncation {
  int p = 1;
  double B0 = 1.0;
  int K_max = 64;

  double b() const { return double(p) * B0; }
  int dim() const { return K_max + 1; }
};

enum class FockSym { One, Z, Zbar, AbsZ2, X, Y, Gauss };

// Closed-form Toeplitz matrices from Gaussian moment integrals.  The Gauss
// variant takes the exponent c of exp(-c|z|^2).
Eigen::MatrixXcd fock_toeplitz_exact(const FockTruncation& t, FockSym sym, double c = 0.0);

// General-symbol path: Gauss-Laguerre radial times uniform angular quadrature
// of <f e_k, e_l>.  Two consecutive radial orders are compared; throws
// QuadratureNotConverged when they disagree beyond 1e-9.
Eigen::MatrixXcd fock_toeplitz_quadrature(const FockTruncation& t, const Symbol& f,
                                          int radial_order = 80, int angular_order = 256);

struct FockKernelValue {
  cplx closed;  // (p B0 / 2 pi) exp(p B0 (z zbar'/2 - |z|^2/4 - |z'|^2/4))
  cplx series;  // truncated-sum evaluation over the basis
};

// Both evaluations of the Bergman kernel; throws TruncationInsufficient when
// the computed Gaussian tail bound of the series exceeds 1e-12 relative to
// the diagonal scale p*B0/(2 pi).
FockKernelValue fock_bergman_kernel(const FockTruncation& t, cplx z, cplx zp);

// Computes [T_x, T_y] exactly, compares with i p^{-1} T_c for c = +-1/B0 on
// interior indices, installs and returns the winning sign for the global
// Poisson convention.  Throws AmbiguousSign if the two defects are within a
// factor 2 of each other.
int calibrate_poisson_sign(const FockTruncation& t);

// Drops the last `edge` rows and columns (truncation-edge indices).
Eigen::MatrixXcd trim_edge(const Eigen::MatrixXcd& m, int edge);

// Gauss-Laguerre nodes and weights for integrals against exp(-u) on [0, inf).
void gauss_laguerre(int order, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace btq
