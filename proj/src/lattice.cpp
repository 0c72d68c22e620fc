#include "btq/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "btq/errors.hpp"

namespace btq {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

Eigen::VectorXcd SparseHermitian::multiply(const Eigen::VectorXcd& u) const {
  if (u.size() != n) throw DimensionMismatch("multiply: vector has wrong length");
  return mat * u;
}

void SparseHermitian::dump(std::ostream& os) const {
  char buf[96];
  os << n << " " << mat.nonZeros() << "\n";
  for (int k = 0; k < mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(mat, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n", long(it.row()), long(it.col()),
                    it.value().real(), it.value().imag());
      os << buf;
    }
}

SparseHermitian SparseHermitian::from_triplets(Eigen::Index n,
                                               const std::vector<Eigen::Triplet<cplx>>& trip) {
  SparseHermitian s;
  s.n = n;
  s.mat.resize(n, n);
  s.mat.setFromTriplets(trip.begin(), trip.end());
  s.mat.makeCompressed();
  return s;
}

LatticeBundle build_links(const SymplecticModel& model, int p, int M, int r, double phi_max) {
  if (!model.is_torus()) throw Unsupported("build_links: lattice bundles live on the torus");
  if (p < 0) throw Error("build_links: p must be >= 0");
  if (M < 8) throw Error("build_links: grid must have M >= 8");
  if (r < 1) throw Error("build_links: rank must be >= 1");
  int N = check_quantizable(model);

  LatticeBundle b;
  b.M = M;
  b.p = p;
  b.r = r;
  b.model = model;
  b.theta_x = Eigen::MatrixXd::Zero(M, M);
  b.theta_y = Eigen::MatrixXd::Zero(M, M);
  b.plaquette_flux = Eigen::MatrixXd::Zero(M, M);

  const double h = b.h();
  double max_flux = 0.0;
  for (int i = 0; i < M; ++i) {
    double x0 = i * h, x1 = (i + 1) * h;
    // Exact column flux of p*omega through one plaquette; y-independent.
    double phi = p * h * (model.B_antiderivative(x1) - model.B_antiderivative(x0));
    max_flux = std::max(max_flux, std::abs(phi));
    for (int j = 0; j < M; ++j) b.plaquette_flux(i, j) = phi;
  }
  if (p > 0 && max_flux > phi_max)
    throw ResolutionTooCoarse("max plaquette flux " + std::to_string(max_flux) +
                              " exceeds guard " + std::to_string(phi_max) + " at M=" +
                              std::to_string(M));

  for (int i = 0; i < M; ++i) {
    double psi = p * h * model.B_antiderivative(i * h);
    for (int j = 0; j < M; ++j) b.theta_y(i, j) = -psi;
  }
  // Seam links (i = M-1 -> 0): the column-flux gauge is not periodic in x;
  // a j-linear phase restores the plaquette identity, and the corner closes
  // exactly because the total flux is the integer 2*pi*p*N.
  for (int j = 0; j < M; ++j) b.theta_x(M - 1, j) = kTwoPi * double(p) * N * j / M;
  return b;
}

SparseHermitian renormalized_laplacian(const LatticeBundle& b) {
  const int M = b.M;
  const double h = b.h();
  const double inv_h2 = 1.0 / (h * h);
  const Eigen::Index nn = b.nodes();

  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<size_t>(b.dim()) * 5);
  for (int s = 0; s < b.r; ++s) {
    const Eigen::Index off = s * nn;
    for (int j = 0; j < M; ++j)
      for (int i = 0; i < M; ++i) {
        Eigen::Index v = off + b.node(i, j);
        double diag = 4.0 * inv_h2 - b.p * tau(b.model, b.coord(i, j));
        trip.emplace_back(v, v, cplx(diag, 0));
        // +x and +y hops; each undirected edge appears once here and once as
        // the conjugate from the neighbouring row, keeping A = A* exact.
        Eigen::Index wx = off + b.node((i + 1) % M, j);
        cplx ux = std::polar(1.0, b.theta_x(i, j));
        trip.emplace_back(v, wx, -ux * inv_h2);
        trip.emplace_back(wx, v, -std::conj(ux) * inv_h2);
        Eigen::Index wy = off + b.node(i, (j + 1) % M);
        cplx uy = std::polar(1.0, b.theta_y(i, j));
        trip.emplace_back(v, wy, -uy * inv_h2);
        trip.emplace_back(wy, v, -std::conj(uy) * inv_h2);
      }
  }
  return SparseHermitian::from_triplets(b.dim(), trip);
}

LatticeBundle gauge_transform(const LatticeBundle& b, const Eigen::MatrixXd& chi) {
  if (chi.rows() != b.M || chi.cols() != b.M)
    throw DimensionMismatch("gauge_transform: chi must be M x M");
  LatticeBundle g = b;
  const int M = b.M;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      g.theta_x(i, j) = chi(i, j) + b.theta_x(i, j) - chi((i + 1) % M, j);
      g.theta_y(i, j) = chi(i, j) + b.theta_y(i, j) - chi(i, (j + 1) % M);
    }
  return g;
}

int grid_policy(const SymplecticModel& model, int p, double phi_max, int multiple) {
  if (!model.is_torus()) throw Unsupported("grid_policy applies to the torus model");
  int N = check_quantizable(model);
  // Mean-field lower bound, then bump until the exact per-plaquette guard
  // passes (only the modulated field can need the extra notch).
  double need = std::sqrt(kTwoPi * std::max(p, 1) * N / phi_max);
  int M = std::max(8, multiple * static_cast<int>(std::ceil(need / multiple)));
  for (;; M += multiple) {
    double h = 1.0 / M;
    double worst = 0.0;
    for (int i = 0; i < M; ++i) {
      double f = p * h *
                 (model.B_antiderivative((i + 1) * h) - model.B_antiderivative(i * h));
      worst = std::max(worst, std::abs(f));
    }
    if (worst <= phi_max) return M;
  }
}

}  // namespace btq
