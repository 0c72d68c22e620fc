#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "btq/model.hpp"
#include "btq/semiclassics.hpp"

namespace btq {

// Run configuration parsed from the sectioned key=value text format.  Every
// field except the model kind has a default; the canonical serialization
// (all fields materialized, fixed order) is what gets hashed.
struct RunConfig {
  // [model]
  std::string kind;  // "torus2" | "fockplane"; required
  int N = 1;
  double B0 = 0.0;  // 0 = derive (2*pi*N on the torus, 1.0 on the plane)
  double B1 = 0.0;

  // [run]
  std::vector<int> p_list;            // empty = per-study defaults
  std::uint64_t seed = 20240917;
  int jobs = 4;
  bool refinement_check = false;      // re-run the smallest p at 2M and record the delta
  std::vector<std::string> studies;   // optional preselection

  // [grid]
  double phi_max = 0.2;
  int m_multiple = 8;
  int m_override = 0;
  int m_min = 0;

  // [symbols]
  std::string f = "cos(2pi*1*x)";
  std::string g = "sin(2pi*1*y)";
  std::vector<int> lambda_list = {1, 2, 4, 8};

  // [fock]
  int fock_kmax = 64;
  int fock_trim = 4;

  // [bergman]
  double c0_factor = 0.2;
  int m_growth = 4;
  double window_factor = 4.0;
  double radius_cap = 0.45;

  // [weights]
  double alpha_cap_factor = 0.5;
  int alpha_points = 9;
  int y_points = 9;

  // [decay]
  double decay_u_lo = 0.7;
  double decay_u_hi = 2.8;
  double decay_r2_min = 0.9;
  double decay_stability = 0.25;

  // [tolerances]
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

  // [io]
  std::string out_dir = "out";
  std::string cache_dir;  // empty = $BTQ_CACHE_DIR or "cache"

  SymplecticModel model() const;
  StudyParams study_params() const;
  std::string canonical() const;
  std::uint64_t hash() const;
};

// Parses and validates; unknown sections or keys are hard errors carrying the
// line number.  Model-level validation (integral flux, B1 < B0) runs here.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<memory>");

}  // namespace btq
