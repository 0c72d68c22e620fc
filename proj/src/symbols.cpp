#include "btq/symbols.hpp"

#include <cctype>
#include <cmath>

#include "btq/errors.hpp"

namespace btq {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

Symbol Symbol::eval_only(std::string id, Fn eval, bool real_valued) {
  Symbol s;
  s.id_ = std::move(id);
  s.eval_ = std::move(eval);
  s.real_ = real_valued;
  return s;
}

cplx Symbol::dx(double x, double y) const {
  if (!dx_) throw MissingDerivative("symbol '" + id_ + "' has no registered d/dx");
  return dx_(x, y);
}

cplx Symbol::dy(double x, double y) const {
  if (!dy_) throw MissingDerivative("symbol '" + id_ + "' has no registered d/dy");
  return dy_(x, y);
}

void Symbol::compute_sups() const {
  const int n = 64;
  const double lo = plane_domain_ ? -3.0 : 0.0;
  const double hi = plane_domain_ ? 3.0 : 1.0;
  double sa = 0.0, sg = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double x = lo + (hi - lo) * i / n;
      double y = lo + (hi - lo) * j / n;
      sa = std::max(sa, std::abs(eval_(x, y)));
      if (has_derivatives())
        sg = std::max(sg, std::hypot(std::abs(dx_(x, y)), std::abs(dy_(x, y))));
    }
  }
  sup_abs_ = sa;
  sup_grad_ = sg;
}

double Symbol::sup_abs() const {
  if (sup_abs_ < 0) compute_sups();
  return sup_abs_;
}

double Symbol::sup_grad() const {
  if (sup_grad_ < 0) compute_sups();
  return sup_grad_;
}

Symbol operator+(const Symbol& a, const Symbol& b) {
  Symbol s;
  s.id_ = a.id_ + " + " + b.id_;
  s.real_ = a.real_ && b.real_;
  s.plane_domain_ = a.plane_domain_ || b.plane_domain_;
  auto ae = a.eval_, be = b.eval_;
  s.eval_ = [ae, be](double x, double y) { return ae(x, y) + be(x, y); };
  if (a.has_derivatives() && b.has_derivatives()) {
    auto adx = a.dx_, bdx = b.dx_, ady = a.dy_, bdy = b.dy_;
    s.dx_ = [adx, bdx](double x, double y) { return adx(x, y) + bdx(x, y); };
    s.dy_ = [ady, bdy](double x, double y) { return ady(x, y) + bdy(x, y); };
  }
  return s;
}

Symbol operator-(const Symbol& a, const Symbol& b) { return a + (-1.0) * b; }

Symbol operator*(const Symbol& a, const Symbol& b) {
  Symbol s;
  s.id_ = "(" + a.id_ + ")*(" + b.id_ + ")";
  s.real_ = a.real_ && b.real_;
  s.plane_domain_ = a.plane_domain_ || b.plane_domain_;
  auto ae = a.eval_, be = b.eval_;
  s.eval_ = [ae, be](double x, double y) { return ae(x, y) * be(x, y); };
  if (a.has_derivatives() && b.has_derivatives()) {
    auto adx = a.dx_, bdx = b.dx_, ady = a.dy_, bdy = b.dy_;
    s.dx_ = [ae, be, adx, bdx](double x, double y) {
      return adx(x, y) * be(x, y) + ae(x, y) * bdx(x, y);
    };
    s.dy_ = [ae, be, ady, bdy](double x, double y) {
      return ady(x, y) * be(x, y) + ae(x, y) * bdy(x, y);
    };
  }
  return s;
}

Symbol operator*(double c, const Symbol& a) {
  Symbol s;
  s.id_ = std::to_string(c) + "*" + a.id_;
  s.real_ = a.real_;
  s.plane_domain_ = a.plane_domain_;
  auto ae = a.eval_;
  s.eval_ = [c, ae](double x, double y) { return c * ae(x, y); };
  if (a.has_derivatives()) {
    auto adx = a.dx_, ady = a.dy_;
    s.dx_ = [c, adx](double x, double y) { return c * adx(x, y); };
    s.dy_ = [c, ady](double x, double y) { return c * ady(x, y); };
  }
  return s;
}

// ---- built-ins ---------------------------------------------------------------

Symbol sym_cos_x(int k) {
  double w = kTwoPi * k;
  return Symbol("cos(2pi*" + std::to_string(k) + "*x)",
                [w](double x, double) { return cplx(std::cos(w * x), 0); },
                [w](double x, double) { return cplx(-w * std::sin(w * x), 0); },
                [](double, double) { return cplx(0, 0); }, true);
}

Symbol sym_sin_x(int k) {
  double w = kTwoPi * k;
  return Symbol("sin(2pi*" + std::to_string(k) + "*x)",
                [w](double x, double) { return cplx(std::sin(w * x), 0); },
                [w](double x, double) { return cplx(w * std::cos(w * x), 0); },
                [](double, double) { return cplx(0, 0); }, true);
}

Symbol sym_cos_y(int k) {
  double w = kTwoPi * k;
  return Symbol("cos(2pi*" + std::to_string(k) + "*y)",
                [w](double, double y) { return cplx(std::cos(w * y), 0); },
                [](double, double) { return cplx(0, 0); },
                [w](double, double y) { return cplx(-w * std::sin(w * y), 0); }, true);
}

Symbol sym_sin_y(int k) {
  double w = kTwoPi * k;
  return Symbol("sin(2pi*" + std::to_string(k) + "*y)",
                [w](double, double y) { return cplx(std::sin(w * y), 0); },
                [](double, double) { return cplx(0, 0); },
                [w](double, double y) { return cplx(w * std::cos(w * y), 0); }, true);
}

Symbol sym_one() { return sym_const(1.0); }

Symbol sym_const(double c) {
  return Symbol("const(" + std::to_string(c) + ")",
                [c](double, double) { return cplx(c, 0); },
                [](double, double) { return cplx(0, 0); },
                [](double, double) { return cplx(0, 0); }, true);
}

Symbol sym_coord_x() {
  return Symbol("x", [](double x, double) { return cplx(x, 0); },
                [](double, double) { return cplx(1, 0); },
                [](double, double) { return cplx(0, 0); }, true);
}

Symbol sym_coord_y() {
  return Symbol("y", [](double, double y) { return cplx(y, 0); },
                [](double, double) { return cplx(0, 0); },
                [](double, double) { return cplx(1, 0); }, true);
}

Symbol sym_z() {
  Symbol s("z", [](double x, double y) { return cplx(x, y); },
           [](double, double) { return cplx(1, 0); },
           [](double, double) { return cplx(0, 1); }, false);
  s.set_plane_domain(true);
  return s;
}

Symbol sym_zbar() {
  Symbol s("zbar", [](double x, double y) { return cplx(x, -y); },
           [](double, double) { return cplx(1, 0); },
           [](double, double) { return cplx(0, -1); }, false);
  s.set_plane_domain(true);
  return s;
}

Symbol sym_abs_z2() {
  Symbol s("absz2", [](double x, double y) { return cplx(x * x + y * y, 0); },
           [](double x, double) { return cplx(2 * x, 0); },
           [](double, double y) { return cplx(2 * y, 0); }, true);
  s.set_plane_domain(true);
  return s;
}

Symbol sym_gauss(double c) {
  Symbol s("gauss(" + std::to_string(c) + ")",
           [c](double x, double y) { return cplx(std::exp(-c * (x * x + y * y)), 0); },
           [c](double x, double y) {
             return cplx(-2 * c * x * std::exp(-c * (x * x + y * y)), 0);
           },
           [c](double x, double y) {
             return cplx(-2 * c * y * std::exp(-c * (x * x + y * y)), 0);
           },
           true);
  s.set_plane_domain(true);
  return s;
}

// ---- parser ------------------------------------------------------------------
//
// symbol  := term (('+'|'-') term)*
// term    := [coeff '*'] factor ('*' factor)*
// factor  := ('cos'|'sin') '(' '2pi' '*' INT '*' ('x'|'y') ')'
//          | 'x' | 'y' | 'z' | 'zbar' | 'absz2' | 'one' | 'gauss' '(' REAL ')'
//          | REAL

namespace {

struct Lexer {
  std::string s;
  size_t pos = 0;
  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip();
    return pos >= s.size();
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c))
      throw ParseError("expected '" + std::string(1, c) + "' at position " +
                       std::to_string(pos) + " in symbol '" + s + "'");
  }
  std::string ident() {
    skip();
    size_t start = pos;
    while (pos < s.size() && (std::isalpha(static_cast<unsigned char>(s[pos])) ||
                              std::isdigit(static_cast<unsigned char>(s[pos]))))
      ++pos;
    return s.substr(start, pos - start);
  }
  double number() {
    skip();
    size_t n = 0;
    double v;
    try {
      v = std::stod(s.substr(pos), &n);
    } catch (const std::exception&) {
      throw ParseError("expected a number at position " + std::to_string(pos) +
                       " in symbol '" + s + "'");
    }
    pos += n;
    return v;
  }
};

Symbol parse_factor(Lexer& lx) {
  char c = lx.peek();
  if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return sym_const(lx.number());
  std::string name = lx.ident();
  if (name == "cos" || name == "sin") {
    lx.expect('(');
    std::string tp = lx.ident();
    if (tp != "2pi") throw ParseError("expected '2pi' inside " + name + "() in '" + lx.s + "'");
    lx.expect('*');
    int k = static_cast<int>(lx.number());
    lx.expect('*');
    std::string var = lx.ident();
    lx.expect(')');
    if (var == "x") return name == "cos" ? sym_cos_x(k) : sym_sin_x(k);
    if (var == "y") return name == "cos" ? sym_cos_y(k) : sym_sin_y(k);
    throw ParseError("trig factor variable must be x or y in '" + lx.s + "'");
  }
  if (name == "gauss") {
    lx.expect('(');
    double cc = lx.number();
    lx.expect(')');
    return sym_gauss(cc);
  }
  if (name == "x") return sym_coord_x();
  if (name == "y") return sym_coord_y();
  if (name == "z") return sym_z();
  if (name == "zbar") return sym_zbar();
  if (name == "absz2") return sym_abs_z2();
  if (name == "one") return sym_one();
  throw ParseError("unknown symbol factor '" + name + "' in '" + lx.s + "'");
}

Symbol parse_term(Lexer& lx) {
  Symbol f = parse_factor(lx);
  while (lx.accept('*')) f = f * parse_factor(lx);
  return f;
}

}  // namespace

Symbol parse_symbol(const std::string& text) {
  Lexer lx{text};
  if (lx.eof()) throw ParseError("empty symbol");
  bool neg = lx.accept('-');
  Symbol acc = parse_term(lx);
  if (neg) acc = (-1.0) * acc;
  while (!lx.eof()) {
    if (lx.accept('+'))
      acc = acc + parse_term(lx);
    else if (lx.accept('-'))
      acc = acc - parse_term(lx);
    else
      throw ParseError("unexpected character at position " + std::to_string(lx.pos) +
                       " in symbol '" + text + "'");
  }
  return acc;
}

// ---- matrix symbols ------------------------------------------------------------

void MatrixSymbol::add_term(const Eigen::MatrixXcd& coeff, const Symbol& scalar) {
  if (coeff.rows() != rank_ || coeff.cols() != rank_)
    throw RankMismatch("matrix symbol term has wrong shape");
  terms_.emplace_back(coeff, scalar);
}

Eigen::MatrixXcd MatrixSymbol::eval(double x, double y) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rank_, rank_);
  for (const auto& [m, s] : terms_) out += m * s(x, y);
  return out;
}

bool MatrixSymbol::hermitian_valued() const {
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      Eigen::MatrixXcd v = eval(i / 9.0, j / 9.0);
      if ((v - v.adjoint()).norm() > 1e-12 * (1.0 + v.norm())) return false;
    }
  return true;
}

double MatrixSymbol::sup_norm() const {
  double s = 0.0;
  for (int i = 0; i < 33; ++i)
    for (int j = 0; j < 33; ++j)
      s = std::max(s, eval(i / 33.0, j / 33.0).operatorNorm());
  return s;
}

MatrixSymbol operator*(const MatrixSymbol& a, const MatrixSymbol& b) {
  if (a.rank_ != b.rank_) throw RankMismatch("matrix symbol product rank mismatch");
  MatrixSymbol out("(" + a.id_ + ")*(" + b.id_ + ")", a.rank_);
  for (const auto& [ma, sa] : a.terms_)
    for (const auto& [mb, sb] : b.terms_) out.add_term(ma * mb, sa * sb);
  return out;
}

std::pair<MatrixSymbol, MatrixSymbol> builtin_matrix_pair() {
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  sz << 1, 0, 0, -1;
  MatrixSymbol f("sx*cos(2pi*1*x) + sz", 2);
  f.add_term(sx, sym_cos_x(1));
  f.add_term(sz, sym_one());
  MatrixSymbol g("sy*sin(2pi*1*y) + sx", 2);
  g.add_term(sy, sym_sin_y(1));
  g.add_term(sx, sym_one());
  return {f, g};
}

}  // namespace btq
