#include "btq/bergman.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "btq/errors.hpp"

namespace btq {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

cplx model_kernel(const ModelKernelParams& params, const Eigen::VectorXd& Z,
                  const Eigen::VectorXd& Zp) {
  const int n = static_cast<int>(params.a.size());
  if (Z.size() != 2 * n || Zp.size() != 2 * n)
    throw DimensionMismatch("model_kernel: offsets must have 2n components");
  double amp = 1.0;
  cplx expo(0, 0);
  for (int k = 0; k < n; ++k) {
    double a = params.a[k];
    amp *= a / kTwoPi;
    cplx zk(Z[2 * k], Z[2 * k + 1]);
    cplx zpk(Zp[2 * k], Zp[2 * k + 1]);
    expo += -0.25 * a * (std::norm(zk) + std::norm(zpk) - 2.0 * zk * std::conj(zpk));
  }
  return amp * std::exp(expo);
}

void KernelField::write_csv(std::ostream& os) const {
  char buf[160];
  os << "Z1,Z2,Z1p,Z2p,re,im\n";
  for (size_t i = 0; i < offsets.size(); ++i)
    for (size_t j = 0; j < offsets.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", offsets[i][0],
                    offsets[i][1], offsets[j][0], offsets[j][1],
                    values(i, j).real(), values(i, j).imag());
      os << buf;
    }
}

namespace {

// Phase of the parallel-transport factor t(Z) = exp(i p int_{x0 -> x0+Z} A)
// along the straight segment, in the column-flux gauge A = Phi(x) dy.  A
// parallel section satisfies u(x) = t(x) u(x0) with the hopping convention
// U_{v->w} = exp(-i int p A), so normal-frame components are conj(t) u.
double transport_phase(const SymplecticModel& m, int p, const Eigen::Vector2d& x0,
                       const Eigen::Vector2d& Z) {
  double x = x0[0], zx = Z[0], zy = Z[1];
  double lin = m.B0 * (x + 0.5 * zx);
  double osc;
  if (m.B1 == 0.0) {
    osc = 0.0;
  } else if (std::abs(zx) < 1e-12) {
    osc = m.B1 / kTwoPi * std::sin(kTwoPi * x);
  } else {
    osc = m.B1 / kTwoPi * (std::cos(kTwoPi * x) - std::cos(kTwoPi * (x + zx))) / (kTwoPi * zx);
  }
  return double(p) * zy * (lin + osc);
}

}  // namespace

KernelField projector_kernel(const SpectralSubspace& s, const LatticeBundle& b, int i0,
                             int j0, double radius, int stride) {
  if (radius > 0.5 + 1e-12)
    throw RadiusTooLarge("radius " + std::to_string(radius) + " beyond the injectivity scale");
  if (stride < 1) stride = 1;
  const int M = b.M;
  const double h = b.h();
  Eigen::Vector2d x0 = b.coord(i0, j0);
  if (x0[0] - radius < -1e-12 || x0[0] + radius > 1.0 + 1e-12 || x0[1] - radius < -1e-12 ||
      x0[1] + radius > 1.0 + 1e-12)
    throw RadiusTooLarge("transport path from base point would cross the gauge seam");
  if (s.basis.rows() != b.dim())
    throw DimensionMismatch("projector_kernel: subspace does not match the bundle");

  KernelField K;
  K.x0 = x0;
  K.h = h;
  K.p = b.p;

  const int reach = static_cast<int>(std::floor(radius / h));
  std::vector<Eigen::Index> nodes;
  std::vector<cplx> phases;
  for (int dj = -reach; dj <= reach; dj += stride)
    for (int di = -reach; di <= reach; di += stride) {
      Eigen::Vector2d Z(di * h, dj * h);
      if (Z.norm() > radius + 1e-12) continue;
      int iw = ((i0 + di) % M + M) % M;
      int jw = ((j0 + dj) % M + M) % M;
      K.offsets.push_back(Z);
      nodes.push_back(b.node(iw, jw));
      phases.push_back(std::polar(1.0, transport_phase(b.model, b.p, x0, Z)));
    }

  const size_t m = K.offsets.size();
  // Kernel in the h^{-2} convention: (V V^H) restricted to the sample nodes,
  // then rewritten into the normal frame, psi_norm(Z) = conj(t(Z)) psi(x0+Z).
  Eigen::MatrixXcd rows(m, s.dim());
  for (size_t i = 0; i < m; ++i) rows.row(i) = std::conj(phases[i]) * s.basis.row(nodes[i]);
  K.values = rows * rows.adjoint();
  return K;
}

double Poly4::eval(const Eigen::VectorXd& Z, const Eigen::VectorXd& Zp) const {
  double v[4] = {Z[0], Z[1], Zp[0], Zp[1]};
  double out = 0.0;
  for (const auto& t : terms) {
    double term = t.c;
    for (int q = 0; q < 4; ++q)
      for (int e = 0; e < t.e[q]; ++e) term *= v[q];
    out += term;
  }
  return out;
}

double expansion_residual(const KernelField& K, const ModelKernelParams& params,
                          const std::vector<Poly4>& Q, int p, int k, double C0,
                          int M_growth, bool diagonal_only) {
  if (static_cast<int>(Q.size()) != k + 1)
    throw DimensionMismatch("expansion_residual: need k+1 coefficient tables");
  const double sp = std::sqrt(double(p));
  const size_t m = K.offsets.size();
  double sup = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const Eigen::VectorXd Z = K.offsets[i];
    size_t jlo = diagonal_only ? i : 0;
    size_t jhi = diagonal_only ? i + 1 : m;
    for (size_t j = jlo; j < jhi; ++j) {
      const Eigen::VectorXd Zp = K.offsets[j];
      Eigen::VectorXd sZ = sp * Z, sZp = sp * Zp;
      cplx series(0, 0);
      cplx pk = model_kernel(params, sZ, sZp);
      for (int r = 0; r <= k; ++r)
        series += Q[r].eval(sZ, sZp) * pk * std::pow(double(p), -0.5 * r);
      // kappa == 1 on the flat models.
      cplx lhs = K.values(i, j) / double(p);
      double weight = std::pow(1.0 + sZ.norm() + sZp.norm(), M_growth) *
                      std::exp(-C0 * sp * (Z - Zp).norm());
      sup = std::max(sup, std::abs(lhs - series) / weight);
    }
  }
  return sup;
}

DecayFit decay_fit(const Eigen::MatrixXcd& K, const LatticeBundle& b, int p, double eps0,
                   double d_hi) {
  const double h = b.h();
  if (!(eps0 > 2.0 * h))
    throw Error("decay_fit: eps0 must exceed two grid spacings");
  const int M = b.M;
  const double sp = std::sqrt(double(p));
  std::vector<double> xs, ys;
  // All separations from a stride-4 set of base nodes; each pair is one
  // sample of log|K| at its geodesic distance.
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i) {
      double d = geodesic_distance(b.model, b.coord(i, j), b.coord(0, 0));
      if (d <= eps0 || d > d_hi) continue;
      for (int j0 = 0; j0 < M; j0 += 4)
        for (int i0 = 0; i0 < M; i0 += 4) {
          Eigen::Index a = b.node(i0, j0);
          Eigen::Index c = b.node((i0 + i) % M, (j0 + j) % M);
          double mag = std::abs(K(a, c));
          if (mag < 1e-13) continue;
          xs.push_back(sp * d);
          ys.push_back(std::log(mag));
        }
    }
  if (xs.size() < 10)
    throw InsufficientSamples("decay_fit has only " + std::to_string(xs.size()) + " pairs");
  LineFit f = fit_line(xs, ys);
  DecayFit out;
  out.mu_hat = -f.slope;
  out.log_c = f.intercept;
  out.r2 = f.r2;
  out.samples = f.n;
  return out;
}

}  // namespace btq
