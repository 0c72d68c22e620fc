#include "btq/toeplitz.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "btq/errors.hpp"
#include "btq/hash.hpp"

namespace btq {

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m) {
  char buf[96];
  os << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", long(i), long(j),
                    m(i, j).real(), m(i, j).imag());
      os << buf;
    }
}

void ToeplitzMatrix::write_csv(std::ostream& os) const { write_matrix_csv(os, m); }

std::uint64_t subspace_hash(const SpectralSubspace& s) {
  std::uint64_t h = fnv1a64(s.eigenvalues.data(), sizeof(double) * s.eigenvalues.size());
  Eigen::Index n = s.basis.rows(), d = s.basis.cols();
  h = fnv1a64(&n, sizeof n, h);
  h = fnv1a64(&d, sizeof d, h);
  return fnv1a64(&s.vol_weight, sizeof s.vol_weight, h);
}

namespace {

void check_match(const SpectralSubspace& s, const LatticeBundle& b) {
  if (s.basis.rows() != b.dim())
    throw DimensionMismatch("subspace dimension does not match the bundle");
}

}  // namespace

ToeplitzMatrix toeplitz_assemble(const SpectralSubspace& s, const LatticeBundle& b,
                                 const Symbol& f) {
  check_match(s, b);
  const Eigen::Index nn = b.nodes();
  Eigen::VectorXcd fv(nn);
  for (int j = 0; j < b.M; ++j)
    for (int i = 0; i < b.M; ++i) fv[b.node(i, j)] = f(i * b.h(), j * b.h());

  Eigen::MatrixXcd fV(s.basis.rows(), s.basis.cols());
  for (int comp = 0; comp < b.r; ++comp)
    fV.middleRows(comp * nn, nn) =
        fv.asDiagonal() * s.basis.middleRows(comp * nn, nn);

  ToeplitzMatrix t;
  t.m = s.vol_weight * (s.basis.adjoint() * fV);
  t.symbol_id = f.id();
  t.p = b.p;
  t.subspace_hash = subspace_hash(s);
  return t;
}

ToeplitzMatrix toeplitz_assemble(const SpectralSubspace& s, const LatticeBundle& b,
                                 const MatrixSymbol& f) {
  check_match(s, b);
  if (f.rank() != b.r)
    throw RankMismatch("matrix symbol rank " + std::to_string(f.rank()) +
                       " vs bundle rank " + std::to_string(b.r));
  const Eigen::Index nn = b.nodes();
  Eigen::MatrixXcd fV = Eigen::MatrixXcd::Zero(s.basis.rows(), s.basis.cols());
  for (int j = 0; j < b.M; ++j)
    for (int i = 0; i < b.M; ++i) {
      Eigen::Index node = b.node(i, j);
      Eigen::MatrixXcd fx = f.eval(i * b.h(), j * b.h());
      for (int sa = 0; sa < b.r; ++sa)
        for (int sb = 0; sb < b.r; ++sb)
          fV.row(sa * nn + node) += fx(sa, sb) * s.basis.row(sb * nn + node);
    }
  ToeplitzMatrix t;
  t.m = s.vol_weight * (s.basis.adjoint() * fV);
  t.symbol_id = f.id();
  t.p = b.p;
  t.subspace_hash = subspace_hash(s);
  return t;
}

double op_norm(const Eigen::MatrixXcd& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::VectorXcd v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = cplx(std::cos(0.7 * (i + 1)), 0.4 * std::sin(0.3 * (i + 1)));
  v /= v.norm();
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXcd w = a.adjoint() * (a * v);
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    double prev = lambda;
    lambda = nw;
    v = w;
    if (it > 2 && std::abs(lambda - prev) <= 1e-10 * std::max(lambda, 1e-300) + 1e-300)
      break;
  }
  return std::sqrt(lambda);
}

namespace {

Eigen::VectorXd node_distances(const LatticeBundle& b, const Eigen::Vector2d& y) {
  Eigen::VectorXd d(b.nodes());
  for (int j = 0; j < b.M; ++j)
    for (int i = 0; i < b.M; ++i)
      d[b.node(i, j)] = geodesic_distance(b.model, b.coord(i, j), y);
  return d;
}

Eigen::VectorXd weight_exponents(const LatticeBundle& b, double alpha,
                                 const Eigen::Vector2d& y) {
  Eigen::VectorXd e = alpha * node_distances(b, y);
  if (e.cwiseAbs().maxCoeff() > 700.0)
    throw WeightOverflow("weight exponent exceeds 700");
  return e;
}

// Spectral norm of a linear map given only through matvecs with its adjoint
// pair, by power iteration on A^H A.
template <class Apply, class ApplyAdj>
double op_norm_matfree(Eigen::Index n, Apply&& av, ApplyAdj&& ahv) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = cplx(std::cos(0.7 * (i + 1)), 0.4 * std::sin(0.3 * (i + 1)));
  v /= v.norm();
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXcd w = ahv(av(v));
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    double prev = lambda;
    lambda = nw;
    v = w;
    if (it > 2 && std::abs(lambda - prev) <= 1e-10 * std::max(lambda, 1e-300) + 1e-300)
      break;
  }
  return std::sqrt(lambda);
}

}  // namespace

double weighted_norm(const SpectralSubspace& s, const LatticeBundle& b,
                     const Eigen::MatrixXcd& t_dxd, double alpha, const Eigen::Vector2d& y,
                     double alpha_cap) {
  check_match(s, b);
  if (std::abs(alpha) > alpha_cap * (1.0 + 1e-12))
    throw Error("weighted_norm: |alpha| above the configured cap");
  Eigen::VectorXd e = weight_exponents(b, alpha, y);
  Eigen::VectorXd ereplicated(b.dim());
  for (int comp = 0; comp < b.r; ++comp) ereplicated.segment(comp * b.nodes(), b.nodes()) = e;
  Eigen::VectorXd dplus = ereplicated.array().exp();
  Eigen::VectorXd dminus = (-ereplicated.array()).exp();

  const double w = s.vol_weight;
  auto av = [&](const Eigen::VectorXcd& u) -> Eigen::VectorXcd {
    Eigen::VectorXcd t1 = dminus.asDiagonal() * u;
    Eigen::VectorXcd t2 = s.basis.adjoint() * t1;
    Eigen::VectorXcd t3 = t_dxd * t2;
    return dplus.asDiagonal() * (s.basis * (w * t3)).eval();
  };
  auto ahv = [&](const Eigen::VectorXcd& u) -> Eigen::VectorXcd {
    Eigen::VectorXcd t1 = dplus.asDiagonal() * u;
    Eigen::VectorXcd t2 = s.basis.adjoint() * t1;
    Eigen::VectorXcd t3 = t_dxd.adjoint() * t2;
    return dminus.asDiagonal() * (s.basis * (w * t3)).eval();
  };
  return op_norm_matfree(b.dim(), av, ahv);
}

double weighted_norm_kernel(const Eigen::MatrixXcd& kernel, const LatticeBundle& b,
                            double alpha, const Eigen::Vector2d& y) {
  if (kernel.rows() != b.dim()) throw DimensionMismatch("weighted_norm_kernel size");
  Eigen::VectorXd e = weight_exponents(b, alpha, y);
  Eigen::VectorXd er(b.dim());
  for (int comp = 0; comp < b.r; ++comp) er.segment(comp * b.nodes(), b.nodes()) = e;
  double h2 = b.h() * b.h();
  Eigen::MatrixXcd conj = er.array().exp().matrix().asDiagonal() * (h2 * kernel) *
                          (-er.array()).exp().matrix().asDiagonal();
  return op_norm(conj);
}

double schur_bound(const Eigen::MatrixXcd& kernel, double h) {
  double rowmax = 0.0, colmax = 0.0;
  Eigen::VectorXd rows = kernel.cwiseAbs().rowwise().sum();
  Eigen::VectorXd cols = kernel.cwiseAbs().colwise().sum();
  rowmax = rows.maxCoeff();
  colmax = cols.maxCoeff();
  return h * h * std::max(rowmax, colmax);
}

double product_defect(const SpectralSubspace& s, const LatticeBundle& b, const Symbol& f,
                      const Symbol& g) {
  ToeplitzMatrix tf = toeplitz_assemble(s, b, f);
  ToeplitzMatrix tg = toeplitz_assemble(s, b, g);
  ToeplitzMatrix tfg = toeplitz_assemble(s, b, f * g);
  return op_norm(Eigen::MatrixXcd(tf.m * tg.m - tfg.m));
}

double product_defect(const SpectralSubspace& s, const LatticeBundle& b,
                      const MatrixSymbol& f, const MatrixSymbol& g) {
  ToeplitzMatrix tf = toeplitz_assemble(s, b, f);
  ToeplitzMatrix tg = toeplitz_assemble(s, b, g);
  ToeplitzMatrix tfg = toeplitz_assemble(s, b, f * g);
  return op_norm(Eigen::MatrixXcd(tf.m * tg.m - tfg.m));
}

double commutator_defect(const SpectralSubspace& s, const LatticeBundle& b, const Symbol& f,
                         const Symbol& g, const Symbol& bracket) {
  if (!f.real_valued() || !g.real_valued())
    throw Unsupported("commutator_defect expects real scalar symbols");
  ToeplitzMatrix tf = toeplitz_assemble(s, b, f);
  ToeplitzMatrix tg = toeplitz_assemble(s, b, g);
  ToeplitzMatrix tb = toeplitz_assemble(s, b, bracket);
  Eigen::MatrixXcd defect =
      tf.m * tg.m - tg.m * tf.m - cplx(0, 1) / double(b.p) * tb.m;
  return op_norm(defect);
}

Eigen::VectorXd symbol_recover(const ToeplitzMatrix& t, const SpectralSubspace& s,
                               const LatticeBundle& b) {
  check_match(s, b);
  if (b.r != 1) throw Unsupported("symbol_recover handles rank-1 bundles");
  if (s.dim() < 1) throw Error("symbol_recover needs a nonempty subspace");
  Eigen::VectorXd out(b.nodes());
  for (Eigen::Index i = 0; i < b.nodes(); ++i) {
    Eigen::RowVectorXcd vi = s.basis.row(i);
    double kp = vi.squaredNorm();
    if (kp < 1e-12)
      throw DegenerateDiagonal("projector diagonal vanishes at node " + std::to_string(i));
    cplx kt = (vi * t.m * vi.adjoint())(0, 0);
    out[i] = kt.real() / kp;
  }
  return out;
}

double series_defect(const SpectralSubspace& s, const LatticeBundle& b,
                     const Eigen::MatrixXcd& tp_dxd, const std::vector<Symbol>& g, int p,
                     const std::vector<double>& alpha_grid,
                     const std::vector<Eigen::Vector2d>& y_set, double alpha_cap) {
  if (g.empty()) throw Error("series_defect needs at least g_0");
  Eigen::MatrixXcd partial = Eigen::MatrixXcd::Zero(tp_dxd.rows(), tp_dxd.cols());
  for (size_t l = 0; l < g.size(); ++l)
    partial += std::pow(double(p), -double(l)) * toeplitz_assemble(s, b, g[l]).m;
  Eigen::MatrixXcd rem = tp_dxd - partial;
  double worst = 0.0;
  for (double a : alpha_grid)
    for (const auto& y : y_set)
      worst = std::max(worst, weighted_norm(s, b, rem, a, y, alpha_cap));
  return std::pow(double(p), double(g.size())) * worst;
}

}  // namespace btq
