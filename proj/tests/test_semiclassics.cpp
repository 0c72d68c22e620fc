#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btq/errors.hpp"
#include "btq/semiclassics.hpp"

using namespace btq;

TEST_CASE("rate_fit: exact power laws") {
  std::vector<std::pair<double, double>> pts;
  for (int p : {4, 8, 16, 32}) pts.emplace_back(p, 3.7 / p);
  RateFit f = rate_fit(pts);
  CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

  pts.clear();
  for (int p : {4, 8, 16, 32}) pts.emplace_back(p, 0.2 / (double(p) * p));
  CHECK(rate_fit(pts).slope == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("rate_fit: two-term model lands between the orders") {
  std::vector<std::pair<double, double>> pts;
  for (int p : {8, 12, 16, 24, 32}) pts.emplace_back(p, 1.0 / p + 2.0 / (double(p) * p));
  RateFit f = rate_fit(pts);
  CHECK(f.slope > -1.3);
  CHECK(f.slope < -0.9);
}

TEST_CASE("rate_fit: zero handling") {
  std::vector<std::pair<double, double>> pts = {{4, 0.0}, {8, 1e-16}, {16, 0.0}};
  CHECK_THROWS_AS(rate_fit(pts), AllZero);

  pts = {{4, 0.5}, {8, 1e-16}, {16, 0.125}, {32, 0.0625}};
  RateFit f = rate_fit(pts);
  CHECK(f.dropped == 1);
  CHECK(f.used == 3);
}

TEST_CASE("grid policy formula") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  StudyParams prm;
  // Smallest multiple of 8 with 2 pi p N / M^2 <= 0.2.
  CHECK(study_grid(m, 4, prm) == 16);
  CHECK(study_grid(m, 8, prm) == 16);
  CHECK(study_grid(m, 16, prm) == 24);
  CHECK(study_grid(m, 24, prm) == 32);
  CHECK(study_grid(m, 32, prm) == 32);
  StudyParams over = prm;
  over.m_override = 48;
  CHECK(study_grid(m, 4, over) == 48);
}

TEST_CASE("gap study on a short constant-field sweep") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  StudyParams prm;
  ConvergenceReport rep = run_gap_study(m, {2, 4, 8}, prm);
  REQUIRE(rep.p.size() == 3);
  CHECK(rep.d[0] == 2);
  CHECK(rep.d[1] == 4);
  CHECK(rep.d[2] == 8);
  // Landau gap 2 p B0 after renormalization.
  CHECK(rep.slope == doctest::Approx(2.0 * m.B0).epsilon(0.1));
  CHECK(rep.fit_kind == "linear");
  CHECK(rep.verdict == Verdict::Pass);
}

TEST_CASE("product study: constant symbol vanishes exactly") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  StudyParams prm;
  ConvergenceReport rep =
      run_product_study(m, sym_const(2.0), parse_symbol("cos(2pi*1*x)"), {2, 4, 8}, prm);
  CHECK(rep.verdict == Verdict::ExactVanishing);
}

TEST_CASE("commutator study on the plane: canonical pair vanishes on the interior") {
  SymplecticModel m = SymplecticModel::plane(1.0);
  StudyParams prm;
  prm.fock_kmax = 48;
  ConvergenceReport rep =
      run_commutator_study(m, sym_coord_x(), sym_coord_y(), {2, 4, 8}, prm);
  CHECK(rep.verdict == Verdict::ExactVanishing);
}

TEST_CASE("kernel study on the plane is exact") {
  SymplecticModel m = SymplecticModel::plane(1.0);
  StudyParams prm;
  ConvergenceReport rep = run_kernel_study(m, {2, 4, 8}, prm);
  CHECK(rep.verdict == Verdict::ExactVanishing);
  for (double v : rep.metric) CHECK(v <= 1e-10);
}

TEST_CASE("kernel study rejects the modulated field") {
  SymplecticModel m = SymplecticModel::torus(2, M_PI);
  StudyParams prm;
  CHECK_THROWS_AS(run_kernel_study(m, {2, 4}, prm), Unsupported);
}

TEST_CASE("symbol study: constant recovery is exact") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  StudyParams prm;
  ConvergenceReport rep = run_symbol_study(m, sym_const(1.0), {2, 4, 8}, prm);
  CHECK(rep.verdict == Verdict::ExactVanishing);
}

TEST_CASE("density study tracks the field profile on a short sweep") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  StudyParams prm;
  prm.density_rel_tol = 0.10;  // short sweep, modest p
  ConvergenceReport rep = run_density_study(m, {4, 8, 16}, prm);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.metric.back() < rep.metric.front() + 1e-12);
}

TEST_CASE("refinement check records a small delta") {
  SymplecticModel m = SymplecticModel::torus(1, 0.0);
  StudyParams prm;
  prm.refinement_check = true;
  ConvergenceReport rep =
      run_product_study(m, parse_symbol("cos(2pi*1*x)"), parse_symbol("sin(2pi*1*y)"),
                        {8, 12, 16}, prm);
  CHECK(rep.refinement_delta >= 0.0);
  CHECK(rep.refinement_delta < 0.10);
}
