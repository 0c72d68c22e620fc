#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>

#include "btq/model.hpp"

namespace btq {

// Complex Hermitian matrix in compressed sparse storage.  Hermiticity holds
// exactly by construction: every off-diagonal entry is inserted together with
// its conjugate partner and diagonals are real.
struct SparseHermitian {
  Eigen::Index n = 0;
  Eigen::SparseMatrix<cplx> mat;  // column-major CSC
  bool hermitian = true;

  Eigen::VectorXcd multiply(const Eigen::VectorXcd& u) const;
  Eigen::MatrixXcd to_dense() const { return Eigen::MatrixXcd(mat); }
  Eigen::Index nnz() const { return mat.nonZeros(); }

  // Text dump: header line "n nnz", then one "row col re im" line per stored
  // entry with 17 significant digits.
  void dump(std::ostream& os) const;

  static SparseHermitian from_triplets(Eigen::Index n,
                                       const std::vector<Eigen::Triplet<cplx>>& trip);
};

// U(1) link-phase discretization of the p-th tensor power bundle over the
// torus on an M x M grid with nodes x_ij = (i/M, j/M).
//
// Gauge: theta_y(i,j) = -p*h*Phi(x_i) with Phi the exact antiderivative of B,
// theta_x = 0 except on the seam links (M-1,j) -> (0,j) which carry
// 2*pi*p*N*j/M so that every plaquette, wrapping ones included, satisfies
//   theta_x(i,j) + theta_y(i+1,j) - theta_x(i,j+1) - theta_y(i,j) = -phi_ij
// modulo 2*pi, phi_ij > 0 the exact plaquette flux of p*omega.
struct LatticeBundle {
  int M = 0;   // grid nodes per side, spacing h = 1/M
  int p = 0;   // tensor power
  int r = 1;   // auxiliary bundle rank
  SymplecticModel model;
  Eigen::MatrixXd theta_x;         // phase on edge (i,j) -> (i+1,j)
  Eigen::MatrixXd theta_y;         // phase on edge (i,j) -> (i,j+1)
  Eigen::MatrixXd plaquette_flux;  // phi_ij, exact from the antiderivative

  double h() const { return 1.0 / M; }
  Eigen::Index nodes() const { return Eigen::Index(M) * M; }
  Eigen::Index dim() const { return nodes() * r; }
  Eigen::Index node(int i, int j) const { return Eigen::Index(i) + Eigen::Index(M) * j; }
  Eigen::Vector2d coord(int i, int j) const { return {i * h(), j * h()}; }
};

// Builds the link phases with prescribed plaquette curvature.  Throws
// NonIntegralFlux via check_quantizable and ResolutionTooCoarse when the
// largest plaquette flux exceeds phi_max.  p = 0 is allowed and produces the
// trivial (all links one) bundle used by the plain-Laplacian limit.
LatticeBundle build_links(const SymplecticModel& model, int p, int M, int r = 1,
                          double phi_max = 0.2);

// The renormalized magnetic Laplacian
//   (Delta_p u)(v) = h^{-2} sum_{e: v->w} (u(v) - U_e u(w)) - p*tau(x_v) u(v),
// acting identically on each of the r auxiliary components.  Degrees of
// freedom are component-major: index = s*M*M + node.
SparseHermitian renormalized_laplacian(const LatticeBundle& b);

// Gauge transform of the links by node phases chi: U'_{v->w} = e^{i chi_v} U e^{-i chi_w}.
LatticeBundle gauge_transform(const LatticeBundle& b, const Eigen::MatrixXd& chi);

// Smallest M (multiple of `multiple`) whose plaquette fluxes pass the guard;
// reduces to ceil(sqrt(2*pi*p*N/phi_max)) rounded up for the constant field.
int grid_policy(const SymplecticModel& model, int p, double phi_max = 0.2, int multiple = 8);

}  // namespace btq
