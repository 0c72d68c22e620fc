#pragma once

#include <Eigen/Dense>

#include "btq/symbols.hpp"

namespace btq {

enum class ModelKind { Torus2, FockPlane };

// A model symplectic surface: either the flat unit 2-torus with magnetic
// 2-form B(x) dx^dy, B(x) = B0 + B1*cos(2pi x), or the plane with constant
// B0.  The flat metric is dx^2 + dy^2 throughout.
struct SymplecticModel {
  ModelKind kind = ModelKind::Torus2;
  double B0 = 2.0 * M_PI;  // mean magnetic coefficient; = 2*pi*N on the torus
  double B1 = 0.0;         // modulation amplitude, 0 <= B1 < B0
  int flux_N = 1;          // integral flux on the torus

  static SymplecticModel torus(int N, double B1 = 0.0);
  static SymplecticModel plane(double B0);

  double B(double x) const;           // pointwise magnetic coefficient
  double B_antiderivative(double x) const;  // exact primitive of B, zero at 0
  bool is_torus() const { return kind == ModelKind::Torus2; }
};

// The skew operator B_x with omega_x(u,v) = <B_x u, v>.  Orientation
// convention (fixed project-wide): B_x = [[0, -B(x)], [B(x), 0]].
Eigen::Matrix2d skew_operator(const SymplecticModel& m, const Eigen::Vector2d& x);

// tau(x) = (1/2) Tr (B_x^* B_x)^{1/2}; equals |B(x)| for the 2d models.
double tau(const SymplecticModel& m, const Eigen::Vector2d& x);

// Uniform lower bound on the singular values of B_x over the domain; B0 - B1.
double mu0(const SymplecticModel& m);

// Poisson bracket {f,g}(x) = sign * (df/dx dg/dy - df/dy dg/dx) / B(x).
// The global sign is the inverse-matrix convention for omega = B dx^dy and is
// pinned empirically by fock::calibrate_poisson_sign; with the project-wide
// Bargmann weight convention it resolves to -1, so {x, y} = -1/B.
int poisson_sign();
void set_poisson_sign(int s);

double poisson_bracket(const SymplecticModel& m, const Symbol& f, const Symbol& g,
                       const Eigen::Vector2d& x);

// The bracket as an evaluation-only Symbol (its own derivatives would need
// second derivatives of f and g, which the library does not register).
Symbol poisson_bracket_symbol(const SymplecticModel& m, const Symbol& f, const Symbol& g);

// Returns the flux integer N = (integral of omega)/(2 pi); throws
// NonIntegralFlux when B0/(2 pi) is not an integer within 1e-12.
int check_quantizable(const SymplecticModel& m);

// Geodesic distance: wrap-minimized Euclidean distance on the torus (minimum
// over the 9 nearest lattice translates), plain Euclidean on the plane.
double geodesic_distance(const SymplecticModel& m, const Eigen::Vector2d& a,
                         const Eigen::Vector2d& b);

}  // namespace btq
