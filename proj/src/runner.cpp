#include "btq/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "btq/cache.hpp"
#include "btq/errors.hpp"
#include "btq/hash.hpp"
#include "btq/report_io.hpp"

namespace btq {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::optional<StudyId> parse_study_name(const std::string& name) {
  if (name == "gap") return StudyId::Gap;
  if (name == "product") return StudyId::Product;
  if (name == "commutator") return StudyId::Commutator;
  if (name == "kernel") return StudyId::Kernel;
  if (name == "symbol") return StudyId::Symbol;
  if (name == "density") return StudyId::Density;
  if (name == "fock-verify") return StudyId::FockVerify;
  if (name == "constants") return StudyId::Constants;
  return std::nullopt;
}

std::vector<StudyId> all_studies() {
  return {StudyId::Gap,    StudyId::Product, StudyId::Commutator, StudyId::Kernel,
          StudyId::Symbol, StudyId::Density, StudyId::FockVerify, StudyId::Constants};
}

std::string study_name(StudyId id) {
  switch (id) {
    case StudyId::Gap: return "gap";
    case StudyId::Product: return "product";
    case StudyId::Commutator: return "commutator";
    case StudyId::Kernel: return "kernel";
    case StudyId::Symbol: return "symbol";
    case StudyId::Density: return "density";
    case StudyId::FockVerify: return "fock-verify";
    case StudyId::Constants: return "constants";
  }
  return "?";
}

std::vector<int> default_p_list(StudyId id) {
  switch (id) {
    case StudyId::Gap: return {4, 8, 16, 24};
    case StudyId::Product:
    case StudyId::Commutator: return {8, 12, 16, 24, 32};
    case StudyId::Kernel:
    case StudyId::Density: return {8, 16, 24};
    case StudyId::Symbol:
    case StudyId::Constants: return {8, 12, 16, 24};
    case StudyId::FockVerify: return {4};
  }
  return {};
}

namespace {

// Shared subspace source: in-memory memo backed by the disk cache; safe for
// concurrent prewarming.
class SubspaceSource {
 public:
  SubspaceSource(std::string cache_dir, std::uint64_t seed, std::ostream& log)
      : dir_(std::move(cache_dir)), seed_(seed), log_(log) {}

  SpectralSubspace get(const LatticeBundle& b) {
    std::uint64_t mh = eigencache_model_hash(b.model, seed_, b.r);
    std::string path = eigencache_filename(dir_, mh, b.p, b.M, b.r);
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = memo_.find(path);
      if (it != memo_.end()) return it->second;
    }
    SpectralSubspace s;
    CacheProbe probe = eigencache_load(path, s);
    if (probe == CacheProbe::Corrupt) {
      std::lock_guard<std::mutex> lk(mu_);
      log_ << "[" << iso_timestamp() << "] warning: cache file " << path
           << " failed its checksum; recomputing\n";
    } else if (probe == CacheProbe::StaleVersion) {
      std::lock_guard<std::mutex> lk(mu_);
      log_ << "[" << iso_timestamp() << "] note: ignoring stale-format cache " << path
           << "\n";
    }
    if (probe != CacheProbe::Hit) {
      ClusterOptions opts;
      opts.expected_dim = b.p * b.model.flux_N * b.r;
      opts.seed = seed_;
      opts.vol_weight = b.h() * b.h();
      SparseHermitian A = renormalized_laplacian(b);
      s = lowest_cluster(A, opts);
      eigencache_store(path, s, mh, b.p, b.M, b.r, seed_);
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      memo_.emplace(path, s);
    }
    return s;
  }

  void prewarm(const SymplecticModel& model, const std::vector<int>& p_list,
               const StudyParams& prm, int jobs) {
    if (!model.is_torus()) return;
    std::vector<LatticeBundle> bundles;
    for (int p : p_list)
      bundles.push_back(build_links(model, p, study_grid(model, p, prm), 1, prm.phi_max));
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= bundles.size()) return;
        get(bundles[i]);
      }
    };
    int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(bundles.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

 private:
  std::string dir_;
  std::uint64_t seed_;
  std::ostream& log_;
  std::mutex mu_;
  std::map<std::string, SpectralSubspace> memo_;
};

struct FockCheck {
  std::string name;
  double value;
  double bound;
  bool ok() const { return value <= bound; }
};

std::vector<FockCheck> fock_verify_battery(double B0, int kmax) {
  std::vector<FockCheck> checks;
  FockTruncation t{4, B0, kmax};

  auto norm_diff = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
  };
  checks.push_back({"quadrature vs closed form: one",
                    norm_diff(fock_toeplitz_quadrature(t, sym_one()),
                              fock_toeplitz_exact(t, FockSym::One)),
                    1e-10});
  checks.push_back({"quadrature vs closed form: x",
                    norm_diff(fock_toeplitz_quadrature(t, sym_coord_x()),
                              fock_toeplitz_exact(t, FockSym::X)),
                    1e-10});
  checks.push_back({"quadrature vs closed form: y",
                    norm_diff(fock_toeplitz_quadrature(t, sym_coord_y()),
                              fock_toeplitz_exact(t, FockSym::Y)),
                    1e-10});
  checks.push_back({"quadrature vs closed form: |z|^2",
                    norm_diff(fock_toeplitz_quadrature(t, sym_abs_z2()),
                              fock_toeplitz_exact(t, FockSym::AbsZ2)),
                    1e-10});
  checks.push_back({"quadrature vs closed form: gauss(1)",
                    norm_diff(fock_toeplitz_quadrature(t, sym_gauss(1.0)),
                              fock_toeplitz_exact(t, FockSym::Gauss, 1.0)),
                    1e-10});

  double kernel_dev = 0.0;
  double reach = 2.0 / std::sqrt(t.b());
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) {
      cplx z(reach * i / 2.0, reach * j / 2.0);
      cplx zp(reach * j / 2.0, -reach * i / 2.0);
      FockKernelValue kv = fock_bergman_kernel(t, z, zp);
      kernel_dev = std::max(kernel_dev, std::abs(kv.closed - kv.series));
    }
  checks.push_back({"series vs closed-form kernel", kernel_dev, 1e-10});

  double model_dev = 0.0;
  ModelKernelParams mk{{B0}};
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) {
      Eigen::VectorXd Z(2), Zp(2);
      Z << reach * i / 2.0, reach * j / 2.0;
      Zp << reach * j / 2.0, -reach * i / 2.0;
      cplx lhs = fock_bergman_kernel(t, {Z[0], Z[1]}, {Zp[0], Zp[1]}).closed / double(t.p);
      cplx rhs = model_kernel(mk, std::sqrt(double(t.p)) * Z, std::sqrt(double(t.p)) * Zp);
      model_dev = std::max(model_dev, std::abs(lhs - rhs));
    }
  checks.push_back({"fock kernel vs model kernel after rescale", model_dev, 1e-12});

  int sign = calibrate_poisson_sign(t);
  Eigen::MatrixXcd tx = fock_toeplitz_exact(t, FockSym::X);
  Eigen::MatrixXcd ty = fock_toeplitz_exact(t, FockSym::Y);
  Eigen::MatrixXcd comm = tx * ty - ty * tx;
  Eigen::MatrixXcd target = cplx(0, 1) / double(t.p) * (double(sign) / B0) *
                            Eigen::MatrixXcd::Identity(t.dim(), t.dim());
  checks.push_back({"interior commutator identity",
                    trim_edge(comm - target, 2).cwiseAbs().maxCoeff(), 1e-12});
  return checks;
}

}  // namespace

int run_studies(const RunConfig& cfg, const std::vector<StudyId>& studies,
                std::ostream& log) {
  auto stamp = [&]() { return "[" + iso_timestamp() + "] "; };
  try {
    std::string cache_dir = cfg.cache_dir;
    if (cache_dir.empty()) {
      const char* env = std::getenv("BTQ_CACHE_DIR");
      cache_dir = env && *env ? env : "cache";
    }
    fs::create_directories(cache_dir);
    fs::create_directories(cfg.out_dir);

    // Pin the Poisson sign once per run from the exact commutator identity.
    int sign = calibrate_poisson_sign(FockTruncation{1, 1.0, 32});
    log << stamp() << "poisson sign calibrated: " << (sign > 0 ? "+1" : "-1") << "\n";

    SymplecticModel model = cfg.model();
    StudyParams prm = cfg.study_params();
    SubspaceSource source(cache_dir, cfg.seed, log);
    prm.provider = [&source](const LatticeBundle& b) { return source.get(b); };
    std::string config_hash = hex64(cfg.hash());

    bool any_fail = false, any_inconclusive = false;
    for (StudyId id : studies) {
      std::vector<int> p_list = cfg.p_list.empty() ? default_p_list(id) : cfg.p_list;
      auto t0 = std::chrono::steady_clock::now();
      log << stamp() << study_name(id) << ": start, p = {";
      for (size_t i = 0; i < p_list.size(); ++i) log << (i ? "," : "") << p_list[i];
      log << "}\n";

      if (model.is_torus() && id != StudyId::FockVerify && id != StudyId::Constants)
        source.prewarm(model, p_list, prm, cfg.jobs);

      std::string base = cfg.out_dir + "/" + study_name(id);
      Verdict verdict = Verdict::Pass;
      if (id == StudyId::FockVerify) {
        auto checks = fock_verify_battery(model.is_torus() ? 1.0 : model.B0,
                                          std::min(cfg.fock_kmax, 48));
        ordered_json j;
        j["study"] = "fock-verify";
        j["config_hash"] = config_hash;
        j["timestamp"] = iso_timestamp();
        j["sign_convention"] = poisson_sign();
        bool ok = true;
        ordered_json items = ordered_json::array();
        for (const auto& c : checks) {
          ordered_json item;
          item["check"] = c.name;
          item["value"] = c.value;
          item["bound"] = c.bound;
          item["ok"] = c.ok();
          items.push_back(item);
          ok = ok && c.ok();
        }
        j["checks"] = items;
        j["verdict"] = ok ? "pass" : "fail";
        write_text_file(base + ".json", j.dump(2) + "\n");
        verdict = ok ? Verdict::Pass : Verdict::Fail;
      } else if (id == StudyId::Constants) {
        ConstantTrackingTable tab =
            run_constant_tracking(model, cfg.lambda_list, p_list, prm);
        write_constants_csv(base + ".csv", tab);
        write_text_file(base + ".json",
                        constants_json(tab, config_hash, iso_timestamp(), poisson_sign()));
        verdict = Verdict::Pass;
      } else {
        ConvergenceReport rep;
        switch (id) {
          case StudyId::Gap: rep = run_gap_study(model, p_list, prm); break;
          case StudyId::Product:
            rep = run_product_study(model, parse_symbol(cfg.f), parse_symbol(cfg.g), p_list,
                                    prm);
            break;
          case StudyId::Commutator:
            rep = run_commutator_study(model, parse_symbol(cfg.f), parse_symbol(cfg.g),
                                       p_list, prm);
            break;
          case StudyId::Kernel: rep = run_kernel_study(model, p_list, prm); break;
          case StudyId::Symbol:
            rep = run_symbol_study(model, parse_symbol(cfg.f), p_list, prm);
            break;
          case StudyId::Density: rep = run_density_study(model, p_list, prm); break;
          default: break;
        }
        write_report_csv(base + ".csv", rep);
        write_text_file(base + ".json", report_json(rep, config_hash, iso_timestamp()));
        verdict = rep.verdict;
        log << stamp() << study_name(id) << ": " << rep.verdict_detail << "\n";
      }

      double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      char line[160];
      std::snprintf(line, sizeof line, "%s: %s (%.2f s)\n", study_name(id).c_str(),
                    to_string(verdict).c_str(), secs);
      log << stamp() << line;
      if (verdict == Verdict::Fail) any_fail = true;
      if (verdict == Verdict::Inconclusive) any_inconclusive = true;
    }
    if (any_fail) return 1;
    if (any_inconclusive) return 2;
    return 0;
  } catch (const Error& e) {
    log << stamp() << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    log << stamp() << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace btq
