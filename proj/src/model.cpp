#include "btq/model.hpp"

#include <atomic>
#include <cmath>

#include "btq/errors.hpp"

namespace btq {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
std::atomic<int> g_poisson_sign{-1};
}  // namespace

SymplecticModel SymplecticModel::torus(int N, double B1) {
  if (N < 1) throw Error("flux integer must be >= 1");
  SymplecticModel m;
  m.kind = ModelKind::Torus2;
  m.flux_N = N;
  m.B0 = kTwoPi * N;
  m.B1 = B1;
  if (!(m.B0 - m.B1 > 0)) throw Error("need B0 - B1 > 0 (non-degeneracy floor)");
  if (B1 < 0) throw Error("B1 must be >= 0");
  return m;
}

SymplecticModel SymplecticModel::plane(double B0) {
  if (!(B0 > 0)) throw Error("plane model needs B0 > 0");
  SymplecticModel m;
  m.kind = ModelKind::FockPlane;
  m.B0 = B0;
  m.B1 = 0.0;
  m.flux_N = 0;
  return m;
}

double SymplecticModel::B(double x) const {
  return kind == ModelKind::FockPlane ? B0 : B0 + B1 * std::cos(kTwoPi * x);
}

double SymplecticModel::B_antiderivative(double x) const {
  return kind == ModelKind::FockPlane ? B0 * x
                                      : B0 * x + B1 * std::sin(kTwoPi * x) / kTwoPi;
}

Eigen::Matrix2d skew_operator(const SymplecticModel& m, const Eigen::Vector2d& x) {
  double b = m.B(x[0]);
  Eigen::Matrix2d s;
  s << 0.0, -b, b, 0.0;
  return s;
}

double tau(const SymplecticModel& m, const Eigen::Vector2d& x) {
  // Both singular values of the 2x2 skew matrix equal |B(x)|, so the half
  // trace of (B^*B)^{1/2} collapses to |B(x)|.
  return std::abs(m.B(x[0]));
}

double mu0(const SymplecticModel& m) { return m.B0 - m.B1; }

int poisson_sign() { return g_poisson_sign.load(); }

void set_poisson_sign(int s) {
  if (s != 1 && s != -1) throw Error("poisson sign must be +-1");
  g_poisson_sign.store(s);
}

double poisson_bracket(const SymplecticModel& m, const Symbol& f, const Symbol& g,
                       const Eigen::Vector2d& x) {
  if (!f.has_derivatives())
    throw MissingDerivative("poisson_bracket: symbol '" + f.id() + "'");
  if (!g.has_derivatives())
    throw MissingDerivative("poisson_bracket: symbol '" + g.id() + "'");
  cplx jac = f.dx(x[0], x[1]) * g.dy(x[0], x[1]) - f.dy(x[0], x[1]) * g.dx(x[0], x[1]);
  return poisson_sign() * jac.real() / m.B(x[0]);
}

Symbol poisson_bracket_symbol(const SymplecticModel& m, const Symbol& f, const Symbol& g) {
  if (!f.has_derivatives() || !g.has_derivatives())
    throw MissingDerivative("poisson_bracket_symbol needs registered derivatives");
  SymplecticModel mc = m;
  Symbol fc = f, gc = g;
  return Symbol::eval_only(
      "{" + f.id() + "," + g.id() + "}",
      [mc, fc, gc](double x, double y) {
        cplx jac = fc.dx(x, y) * gc.dy(x, y) - fc.dy(x, y) * gc.dx(x, y);
        return cplx(poisson_sign()) * jac / mc.B(x);
      },
      f.real_valued() && g.real_valued());
}

int check_quantizable(const SymplecticModel& m) {
  if (!m.is_torus()) throw Unsupported("check_quantizable applies to the torus model");
  // The cosine modulation integrates to zero, so the total flux is B0.
  double ratio = m.B0 / kTwoPi;
  double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-12 || rounded < 1)
    throw NonIntegralFlux("total flux / 2pi = " + std::to_string(ratio));
  return static_cast<int>(rounded);
}

double geodesic_distance(const SymplecticModel& m, const Eigen::Vector2d& a,
                         const Eigen::Vector2d& b) {
  if (!m.is_torus()) return (a - b).norm();
  double best = std::numeric_limits<double>::infinity();
  for (int sx = -1; sx <= 1; ++sx)
    for (int sy = -1; sy <= 1; ++sy) {
      double dx = a[0] - b[0] + sx;
      double dy = a[1] - b[1] + sy;
      best = std::min(best, std::hypot(dx, dy));
    }
  return best;
}

}  // namespace btq
