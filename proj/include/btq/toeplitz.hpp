#pragma once

#include <iosfwd>
#include <string>

#include "btq/eigensolve.hpp"
#include "btq/symbols.hpp"

namespace btq {

// Compression of a multiplication operator to the quantum space, in the
// orthonormal eigenbasis of the subspace: T_kl = <psi_k, f psi_l>.
struct ToeplitzMatrix {
  Eigen::MatrixXcd m;
  std::string symbol_id;
  int p = 0;
  std::uint64_t subspace_hash = 0;

  int dim() const { return static_cast<int>(m.rows()); }
  void write_csv(std::ostream& os) const;  // columns row, col, re, im
};

// Shared matrix CSV format (row, col, re, im); oracle matrices use it too.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m);

std::uint64_t subspace_hash(const SpectralSubspace& s);

// T = V^H F V in the weighted product; scalar symbols act diagonally over
// grid nodes, matrix symbols act pointwise on the rank-r fibre (RankMismatch
// when the ranks disagree).
ToeplitzMatrix toeplitz_assemble(const SpectralSubspace& s, const LatticeBundle& b,
                                 const Symbol& f);
ToeplitzMatrix toeplitz_assemble(const SpectralSubspace& s, const LatticeBundle& b,
                                 const MatrixSymbol& f);

// Spectral norm by power iteration on A^H A with a deterministic start,
// tolerance 1e-10.
double op_norm(const Eigen::MatrixXcd& a);
inline double op_norm(const ToeplitzMatrix& t) { return op_norm(t.m); }

// Norm of D A D^{-1} with D = diag(exp(alpha * d(x_i, y))) and exact geodesic
// distance.  The factored overload conjugates the full-grid operator
// V T V^H (w) without forming it; the kernel overload takes an explicit n x n
// kernel in the h^{-2} convention.  Throws WeightOverflow when an exponent
// exceeds 700 and Error when |alpha| breaks the configured cap.
double weighted_norm(const SpectralSubspace& s, const LatticeBundle& b,
                     const Eigen::MatrixXcd& t_dxd, double alpha, const Eigen::Vector2d& y,
                     double alpha_cap);
double weighted_norm_kernel(const Eigen::MatrixXcd& kernel, const LatticeBundle& b,
                            double alpha, const Eigen::Vector2d& y);

// Schur bound max(sup_x h^2 sum_x' |K|, sup_x' h^2 sum_x |K|) >= operator norm.
double schur_bound(const Eigen::MatrixXcd& kernel, double h);

// || T_f T_g - T_fg ||.
double product_defect(const SpectralSubspace& s, const LatticeBundle& b, const Symbol& f,
                      const Symbol& g);
double product_defect(const SpectralSubspace& s, const LatticeBundle& b,
                      const MatrixSymbol& f, const MatrixSymbol& g);

// || [T_f, T_g] - i p^{-1} T_{fg_bracket} || for real scalar symbols.
double commutator_defect(const SpectralSubspace& s, const LatticeBundle& b, const Symbol& f,
                         const Symbol& g, const Symbol& bracket);

// Leading-symbol estimate g0(x) = K_T(x,x) / K_P(x,x) over grid nodes
// (rank-1 bundles).  Throws DegenerateDiagonal where K_P(x,x) < 1e-12.
Eigen::VectorXd symbol_recover(const ToeplitzMatrix& t, const SpectralSubspace& s,
                               const LatticeBundle& b);

// p^{K+1} * max over (alpha, y) of the weighted norm of
//   T_p - P (sum_l p^{-l} g_l) P,
// the remainder of the Toeplitz asymptotic series truncated at K = #g - 1.
double series_defect(const SpectralSubspace& s, const LatticeBundle& b,
                     const Eigen::MatrixXcd& tp_dxd, const std::vector<Symbol>& g, int p,
                     const std::vector<double>& alpha_grid,
                     const std::vector<Eigen::Vector2d>& y_set, double alpha_cap);

}  // namespace btq
