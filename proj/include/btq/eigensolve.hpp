#pragma once

#include <cstdint>
#include <optional>

#include "btq/lattice.hpp"

namespace btq {

// The low-lying spectral cluster of a Hermitian operator: the quantum space.
// Basis columns are orthonormal in the vol_weight-scaled inner product
// <u,v> = w * u^H v (w = h^2 on the lattice), so for a lattice subspace the
// projector kernel in the h^{-2} convention is simply V V^H.
struct SpectralSubspace {
  Eigen::VectorXd eigenvalues;  // ascending, inside the window
  Eigen::MatrixXcd basis;       // n x d
  Eigen::VectorXd residuals;    // ||A v - lambda v|| per column
  double gap_edge = 0.0;        // smallest computed eigenvalue above the window
  double window_cl = 0.0;       // C_L actually used
  double gap_ratio = 0.0;       // detected gap / largest intra-cluster spacing
  double vol_weight = 1.0;
  int iterations = 0;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  Eigen::Index n() const { return basis.rows(); }
};

struct ClusterOptions {
  std::optional<int> expected_dim;     // grows the candidate window to 2d+8
  std::optional<double> cl_override;   // fixed window edge instead of auto
  std::uint64_t seed = 20240917;
  double vol_weight = 1.0;
  double tol = 1e-11;                  // residual-bound target per Ritz pair
  int max_iter = 4096;
  double gap_ratio_min = 10.0;
};

// Lanczos with full reorthogonalization and a deterministic seeded start.
// Returns every eigenpair below the detected (or overridden) window edge.
// Throws NoGapDetected / NotConverged.
SpectralSubspace lowest_cluster(const SparseHermitian& A, const ClusterOptions& opts = {});

struct WindowSplit {
  int d = 0;         // cluster size
  double ratio = 0;  // gap over largest intra-cluster spacing
  double gap = 0;
};

// Places the window at the largest gap among the candidate values (the lowest
// 2*expected+8 when expected is given) and validates it by the relative-gap
// criterion.  Exposed for reuse by the dense cross-check path.
WindowSplit detect_window(const Eigen::VectorXd& evals_ascending,
                          std::optional<int> expected_dim, double ratio_min = 10.0);

// Full eigendecomposition of a dense Hermitian matrix (tridiagonalization
// plus implicit-shift iterations); cross-validation oracle, capped at 4096.
struct DenseEig {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // Euclid-orthonormal columns
};
DenseEig dense_eig(const Eigen::MatrixXcd& A);

// Dense counterpart of lowest_cluster (same window logic), used as oracle.
SpectralSubspace dense_cluster(const Eigen::MatrixXcd& A,
                               std::optional<int> expected_dim, double vol_weight = 1.0,
                               double ratio_min = 10.0);

// P u = V (w V^H u): orthogonal projection onto the subspace in the weighted
// product; idempotent and self-adjoint.
Eigen::VectorXcd apply_projector(const SpectralSubspace& s, const Eigen::VectorXcd& u);

// Largest principal angle between two equal-dimension subspaces sharing the
// same volume weight.
double max_principal_angle(const SpectralSubspace& a, const SpectralSubspace& b);

}  // namespace btq
