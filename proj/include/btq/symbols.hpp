#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace btq {

using cplx = std::complex<double>;

// A classical observable: a closed-form scalar function on the model domain
// together with its registered analytic first derivatives.  Derivatives are
// explicit lambdas, never finite differences; composite symbols built through
// the combinators below propagate them by the usual calculus rules.
//
// Torus symbols are 1-periodic in both coordinates; plane symbols are read as
// functions of z = x + iy.
class Symbol {
 public:
  using Fn = std::function<cplx(double, double)>;

  Symbol() = default;
  Symbol(std::string id, Fn eval, Fn dx, Fn dy, bool real_valued)
      : id_(std::move(id)),
        eval_(std::move(eval)),
        dx_(std::move(dx)),
        dy_(std::move(dy)),
        real_(real_valued) {}

  // Evaluation-only symbol (no registered derivatives); pointwise use only.
  static Symbol eval_only(std::string id, Fn eval, bool real_valued);

  cplx operator()(double x, double y) const { return eval_(x, y); }
  cplx dx(double x, double y) const;
  cplx dy(double x, double y) const;

  bool has_derivatives() const { return static_cast<bool>(dx_) && static_cast<bool>(dy_); }
  bool real_valued() const { return real_; }
  const std::string& id() const { return id_; }

  // C_b-norm metadata: sup |f| and sup |grad f| on a fixed 64x64 sample grid
  // over the unit square (plane symbols are sampled on [-3,3]^2).
  double sup_abs() const;
  double sup_grad() const;
  void set_plane_domain(bool plane) { plane_domain_ = plane; }

  // Combinators; derivatives propagate when both factors carry them.
  friend Symbol operator+(const Symbol& a, const Symbol& b);
  friend Symbol operator-(const Symbol& a, const Symbol& b);
  friend Symbol operator*(const Symbol& a, const Symbol& b);
  friend Symbol operator*(double c, const Symbol& a);

 private:
  std::string id_;
  Fn eval_, dx_, dy_;
  bool real_ = true;
  bool plane_domain_ = false;
  mutable double sup_abs_ = -1.0, sup_grad_ = -1.0;
  void compute_sups() const;
};

// ---- built-in scalar library ------------------------------------------------

// cos(2*pi*k*x) / sin(2*pi*k*x) and the y-versions; exact 1-periodicity.
Symbol sym_cos_x(int k);
Symbol sym_sin_x(int k);
Symbol sym_cos_y(int k);
Symbol sym_sin_y(int k);
Symbol sym_one();
Symbol sym_const(double c);

// Coordinate and plane symbols: x, y, z, conj(z), |z|^2, exp(-c|z|^2).
Symbol sym_coord_x();
Symbol sym_coord_y();
Symbol sym_z();
Symbol sym_zbar();
Symbol sym_abs_z2();
Symbol sym_gauss(double c);

// Parse the documented mini-grammar, e.g. "cos(2pi*1*x)", "0.5*sin(2pi*2*y)",
// "cos(2pi*1*x)*sin(2pi*1*y) + 2*cos(2pi*3*y)", or on the plane "x", "y",
// "absz2", "gauss(1.5)".  Throws ParseError on malformed input.
Symbol parse_symbol(const std::string& text);

// ---- matrix-valued symbols ---------------------------------------------------

// An r x r symbol assembled as sum of constant complex matrices times scalar
// symbols.  Used for End(E)-valued quantization with a flat auxiliary bundle.
class MatrixSymbol {
 public:
  MatrixSymbol() = default;
  MatrixSymbol(std::string id, int rank) : id_(std::move(id)), rank_(rank) {}

  void add_term(const Eigen::MatrixXcd& coeff, const Symbol& scalar);
  Eigen::MatrixXcd eval(double x, double y) const;

  int rank() const { return rank_; }
  const std::string& id() const { return id_; }
  bool hermitian_valued() const;  // checks Hermiticity on a sample grid
  double sup_norm() const;        // sup of spectral norm on a sample grid

  friend MatrixSymbol operator*(const MatrixSymbol& a, const MatrixSymbol& b);

 private:
  std::string id_;
  int rank_ = 0;
  std::vector<std::pair<Eigen::MatrixXcd, Symbol>> terms_;
};

// The built-in noncommuting rank-2 pair used by the ordering study:
//   f = sx*cos(2pi x) + sz,   g = sy*sin(2pi y) + sx
// with sx, sy, sz the standard 2x2 spin matrices.
std::pair<MatrixSymbol, MatrixSymbol> builtin_matrix_pair();

}  // namespace btq
