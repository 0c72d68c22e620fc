#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "btq/bergman.hpp"
#include "btq/fock.hpp"
#include "btq/toeplitz.hpp"

namespace btq {

enum class Verdict { Pass, Fail, ExactVanishing, Inconclusive };
std::string to_string(Verdict v);

// Per-study sweep record: one row per p plus the fitted rate and the verdict
// against the declared tolerance band.
struct ConvergenceReport {
  std::string study;
  std::string model_desc;
  std::vector<std::string> symbol_ids;
  std::vector<int> p, M, d;
  std::vector<double> metric;
  std::map<std::string, std::vector<double>> extra;  // named per-p columns
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  std::string fit_kind = "loglog";
  Verdict verdict = Verdict::Inconclusive;
  std::string verdict_detail;
  int sign_convention = 0;
  double refinement_delta = -1.0;  // relative metric change under M -> 2M, if checked
};

struct RateFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  int used = 0, dropped = 0;
};

// OLS on (log p, log value); values below 1e-14 are dropped and counted.
// Throws AllZero when every value sits below the floor.
RateFit rate_fit(const std::vector<std::pair<double, double>>& points);

// Knobs and verdict bands; defaults are the project-frozen values.
struct StudyParams {
  std::uint64_t seed = 20240917;
  double phi_max = 0.2;
  int m_multiple = 8;
  int m_override = 0;  // 0 = grid policy
  int m_min = 0;
  int fock_kmax = 64;
  int fock_trim = 4;

  double c0_factor = 0.2;  // C0 = c0_factor * sqrt(mu0)
  int m_growth = 4;
  double window_factor = 4.0;  // sampling window window_factor / sqrt(p mu0)
  double radius_cap = 0.45;
  double alpha_cap_factor = 0.5;  // |alpha| <= factor * sqrt(mu0 p)
  int alpha_points = 9;
  int y_points = 9;

  double decay_u_lo = 0.7;  // pair window in u = sqrt(p) d units
  double decay_u_hi = 2.8;
  double decay_r2_min = 0.9;
  double decay_stability = 0.25;

  double product_slope = -1.0, product_slope_tol = 0.2, product_r2_min = 0.9;
  double commutator_slope = -2.0, commutator_slope_tol = 0.3, commutator_r2_min = 0.85;
  double gap_slope_rel_tol = 0.10;
  double width_slope_max = 0.1;
  double kernel_slope_max = -0.4;
  double kernel_diag_slope_max = -0.9;
  double kernel_plane_tol = 1e-10;
  double symbol_slope_max = -0.4;
  double symbol_final_frac = 0.1;
  double density_rel_tol = 0.05;
  double r2_verdict_min = 0.8;
  bool refinement_check = false;

  // Optional cached-subspace source; when empty the studies solve directly.
  std::function<SpectralSubspace(const LatticeBundle&)> provider;
};

int study_grid(const SymplecticModel& model, int p, const StudyParams& prm);
SpectralSubspace study_subspace(const LatticeBundle& b, const StudyParams& prm);

ConvergenceReport run_gap_study(const SymplecticModel& model, const std::vector<int>& p_list,
                                const StudyParams& prm);

ConvergenceReport run_product_study(const SymplecticModel& model, const Symbol& f,
                                    const Symbol& g, const std::vector<int>& p_list,
                                    const StudyParams& prm);

ConvergenceReport run_commutator_study(const SymplecticModel& model, const Symbol& f,
                                       const Symbol& g, const std::vector<int>& p_list,
                                       const StudyParams& prm);

// Kernel expansion residuals (Q_0 = 1), the diagonal-only variant and the
// off-diagonal decay fit in one sweep; constant-field torus or plane only.
ConvergenceReport run_kernel_study(const SymplecticModel& model,
                                   const std::vector<int>& p_list, const StudyParams& prm);

ConvergenceReport run_symbol_study(const SymplecticModel& model, const Symbol& f,
                                   const std::vector<int>& p_list, const StudyParams& prm);

ConvergenceReport run_density_study(const SymplecticModel& model,
                                    const std::vector<int>& p_list, const StudyParams& prm);

// Product-defect constant c(lambda) = median_p(p * defect) for the built-in
// oscillating family cos(2 pi lambda x) vs sin(2 pi lambda y).  Descriptive.
struct ConstantTrackingTable {
  std::vector<int> lambda;
  std::vector<int> p;
  Eigen::MatrixXd defects;  // lambda rows, p columns
  std::vector<double> c_hat;
  std::vector<double> slope;
};
ConstantTrackingTable run_constant_tracking(const SymplecticModel& model,
                                            const std::vector<int>& lambda_list,
                                            const std::vector<int>& p_list,
                                            const StudyParams& prm);

}  // namespace btq
