#include "btq/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "btq/errors.hpp"
#include "btq/hash.hpp"

namespace btq {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ParseError("bad integer list entry '" + item + "' at line " +
                       std::to_string(line));
    }
  }
  return out;
}

std::vector<std::string> parse_str_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& v, int line) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ParseError("bad numeric value '" + v + "' at line " + std::to_string(line));
}

int parse_int(const std::string& v, int line) {
  try {
    size_t used = 0;
    int d = std::stoi(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ParseError("bad integer value '" + v + "' at line " + std::to_string(line));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<int>& v) {
  if (v.empty()) return "auto";
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig c;
  bool b0_given = false, n_given = false;
  std::string section;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    std::string s = trim(raw);
    size_t hash_pos = s.find('#');
    if (hash_pos != std::string::npos) s = trim(s.substr(0, hash_pos));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(origin + ":" + std::to_string(line) +
                                            ": unterminated section header");
      section = s.substr(1, s.size() - 2);
      static const char* known[] = {"model",   "run",     "grid",    "symbols", "fock",
                                    "bergman", "weights", "decay",   "tolerances", "io"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) throw UnknownKey(origin + ":" + std::to_string(line) + ": section [" +
                                section + "]");
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(line) + ": expected key=value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    std::string qual = section + "." + key;

    if (qual == "model.kind") c.kind = val;
    else if (qual == "model.N") { c.N = parse_int(val, line); n_given = true; }
    else if (qual == "model.B0") { c.B0 = parse_double(val, line); b0_given = true; }
    else if (qual == "model.B1") c.B1 = parse_double(val, line);
    else if (qual == "run.p") c.p_list = parse_int_list(val, line);
    else if (qual == "run.seed") c.seed = std::stoull(val);
    else if (qual == "run.jobs") c.jobs = parse_int(val, line);
    else if (qual == "run.refinement") c.refinement_check = parse_int(val, line) != 0;
    else if (qual == "run.studies") c.studies = parse_str_list(val);
    else if (qual == "grid.phi_max") c.phi_max = parse_double(val, line);
    else if (qual == "grid.m_multiple") c.m_multiple = parse_int(val, line);
    else if (qual == "grid.m_override") c.m_override = parse_int(val, line);
    else if (qual == "grid.m_min") c.m_min = parse_int(val, line);
    else if (qual == "symbols.f") c.f = val;
    else if (qual == "symbols.g") c.g = val;
    else if (qual == "symbols.lambda") c.lambda_list = parse_int_list(val, line);
    else if (qual == "fock.kmax") c.fock_kmax = parse_int(val, line);
    else if (qual == "fock.trim") c.fock_trim = parse_int(val, line);
    else if (qual == "bergman.c0_factor") c.c0_factor = parse_double(val, line);
    else if (qual == "bergman.m_growth") c.m_growth = parse_int(val, line);
    else if (qual == "bergman.window_factor") c.window_factor = parse_double(val, line);
    else if (qual == "bergman.radius_cap") c.radius_cap = parse_double(val, line);
    else if (qual == "weights.alpha_cap_factor") c.alpha_cap_factor = parse_double(val, line);
    else if (qual == "weights.alpha_points") c.alpha_points = parse_int(val, line);
    else if (qual == "weights.y_points") c.y_points = parse_int(val, line);
    else if (qual == "decay.u_lo") c.decay_u_lo = parse_double(val, line);
    else if (qual == "decay.u_hi") c.decay_u_hi = parse_double(val, line);
    else if (qual == "decay.r2_min") c.decay_r2_min = parse_double(val, line);
    else if (qual == "decay.stability") c.decay_stability = parse_double(val, line);
    else if (qual == "tolerances.product_slope") c.product_slope = parse_double(val, line);
    else if (qual == "tolerances.product_slope_tol") c.product_slope_tol = parse_double(val, line);
    else if (qual == "tolerances.product_r2_min") c.product_r2_min = parse_double(val, line);
    else if (qual == "tolerances.commutator_slope") c.commutator_slope = parse_double(val, line);
    else if (qual == "tolerances.commutator_slope_tol") c.commutator_slope_tol = parse_double(val, line);
    else if (qual == "tolerances.commutator_r2_min") c.commutator_r2_min = parse_double(val, line);
    else if (qual == "tolerances.gap_slope_rel_tol") c.gap_slope_rel_tol = parse_double(val, line);
    else if (qual == "tolerances.width_slope_max") c.width_slope_max = parse_double(val, line);
    else if (qual == "tolerances.kernel_slope_max") c.kernel_slope_max = parse_double(val, line);
    else if (qual == "tolerances.kernel_diag_slope_max") c.kernel_diag_slope_max = parse_double(val, line);
    else if (qual == "tolerances.kernel_plane_tol") c.kernel_plane_tol = parse_double(val, line);
    else if (qual == "tolerances.symbol_slope_max") c.symbol_slope_max = parse_double(val, line);
    else if (qual == "tolerances.symbol_final_frac") c.symbol_final_frac = parse_double(val, line);
    else if (qual == "tolerances.density_rel_tol") c.density_rel_tol = parse_double(val, line);
    else if (qual == "tolerances.r2_verdict_min") c.r2_verdict_min = parse_double(val, line);
    else if (qual == "io.out") c.out_dir = val;
    else if (qual == "io.cache") c.cache_dir = val;
    else
      throw UnknownKey(origin + ":" + std::to_string(line) + ": '" + key + "' in section [" +
                       section + "]");
  }

  if (c.kind.empty()) throw ParseError(origin + ": model kind is required");
  if (c.kind != "torus2" && c.kind != "fockplane")
    throw ParseError(origin + ": kind must be torus2 or fockplane");

  if (c.kind == "torus2") {
    if (b0_given) {
      double ratio = c.B0 / kTwoPi;
      if (std::abs(ratio - std::round(ratio)) > 1e-12 || std::round(ratio) < 1)
        throw NonIntegralFlux("B0 = " + fmt(c.B0) + " is not 2*pi*integer");
      int derived = static_cast<int>(std::round(ratio));
      if (n_given && derived != c.N)
        throw ParseError(origin + ": B0 and N disagree");
      c.N = derived;
    } else {
      c.B0 = kTwoPi * c.N;
    }
    if (!(c.B0 - c.B1 > 0)) throw ParseError(origin + ": need B0 - B1 > 0");
    if (c.B1 < 0) throw ParseError(origin + ": need B1 >= 0");
  } else {
    if (!b0_given) c.B0 = 1.0;
    if (c.B1 != 0) throw ParseError(origin + ": plane model has constant field (B1 = 0)");
    if (!(c.B0 > 0)) throw ParseError(origin + ": need B0 > 0");
  }
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

SymplecticModel RunConfig::model() const {
  return kind == "torus2" ? SymplecticModel::torus(N, B1) : SymplecticModel::plane(B0);
}

StudyParams RunConfig::study_params() const {
  StudyParams s;
  s.seed = seed;
  s.phi_max = phi_max;
  s.m_multiple = m_multiple;
  s.m_override = m_override;
  s.m_min = m_min;
  s.fock_kmax = fock_kmax;
  s.fock_trim = fock_trim;
  s.c0_factor = c0_factor;
  s.m_growth = m_growth;
  s.window_factor = window_factor;
  s.radius_cap = radius_cap;
  s.alpha_cap_factor = alpha_cap_factor;
  s.alpha_points = alpha_points;
  s.y_points = y_points;
  s.decay_u_lo = decay_u_lo;
  s.decay_u_hi = decay_u_hi;
  s.decay_r2_min = decay_r2_min;
  s.decay_stability = decay_stability;
  s.product_slope = product_slope;
  s.product_slope_tol = product_slope_tol;
  s.product_r2_min = product_r2_min;
  s.commutator_slope = commutator_slope;
  s.commutator_slope_tol = commutator_slope_tol;
  s.commutator_r2_min = commutator_r2_min;
  s.gap_slope_rel_tol = gap_slope_rel_tol;
  s.width_slope_max = width_slope_max;
  s.kernel_slope_max = kernel_slope_max;
  s.kernel_diag_slope_max = kernel_diag_slope_max;
  s.kernel_plane_tol = kernel_plane_tol;
  s.symbol_slope_max = symbol_slope_max;
  s.symbol_final_frac = symbol_final_frac;
  s.density_rel_tol = density_rel_tol;
  s.r2_verdict_min = r2_verdict_min;
  s.refinement_check = refinement_check;
  return s;
}

std::string RunConfig::canonical() const {
  std::string out;
  out += "[model]\nkind=" + kind + "\nN=" + std::to_string(N) + "\nB0=" + fmt(B0) +
         "\nB1=" + fmt(B1) + "\n";
  out += "[run]\np=" + fmt_list(p_list) + "\nseed=" + std::to_string(seed) +
         "\njobs=" + std::to_string(jobs) +
         "\nrefinement=" + std::to_string(int(refinement_check)) + "\nstudies=";
  for (size_t i = 0; i < studies.size(); ++i) out += (i ? "," : "") + studies[i];
  out += "\n";
  out += "[grid]\nphi_max=" + fmt(phi_max) + "\nm_multiple=" + std::to_string(m_multiple) +
         "\nm_override=" + std::to_string(m_override) + "\nm_min=" + std::to_string(m_min) +
         "\n";
  out += "[symbols]\nf=" + f + "\ng=" + g + "\nlambda=" + fmt_list(lambda_list) + "\n";
  out += "[fock]\nkmax=" + std::to_string(fock_kmax) + "\ntrim=" + std::to_string(fock_trim) +
         "\n";
  out += "[bergman]\nc0_factor=" + fmt(c0_factor) + "\nm_growth=" + std::to_string(m_growth) +
         "\nwindow_factor=" + fmt(window_factor) + "\nradius_cap=" + fmt(radius_cap) + "\n";
  out += "[weights]\nalpha_cap_factor=" + fmt(alpha_cap_factor) +
         "\nalpha_points=" + std::to_string(alpha_points) +
         "\ny_points=" + std::to_string(y_points) + "\n";
  out += "[decay]\nu_lo=" + fmt(decay_u_lo) + "\nu_hi=" + fmt(decay_u_hi) +
         "\nr2_min=" + fmt(decay_r2_min) + "\nstability=" + fmt(decay_stability) + "\n";
  out += "[tolerances]\nproduct_slope=" + fmt(product_slope) +
         "\nproduct_slope_tol=" + fmt(product_slope_tol) +
         "\nproduct_r2_min=" + fmt(product_r2_min) +
         "\ncommutator_slope=" + fmt(commutator_slope) +
         "\ncommutator_slope_tol=" + fmt(commutator_slope_tol) +
         "\ncommutator_r2_min=" + fmt(commutator_r2_min) +
         "\ngap_slope_rel_tol=" + fmt(gap_slope_rel_tol) +
         "\nwidth_slope_max=" + fmt(width_slope_max) +
         "\nkernel_slope_max=" + fmt(kernel_slope_max) +
         "\nkernel_diag_slope_max=" + fmt(kernel_diag_slope_max) +
         "\nkernel_plane_tol=" + fmt(kernel_plane_tol) +
         "\nsymbol_slope_max=" + fmt(symbol_slope_max) +
         "\nsymbol_final_frac=" + fmt(symbol_final_frac) +
         "\ndensity_rel_tol=" + fmt(density_rel_tol) +
         "\nr2_verdict_min=" + fmt(r2_verdict_min) + "\n";
  // Output locations do not change results, so they stay out of the hash.
  return out;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

}  // namespace btq
