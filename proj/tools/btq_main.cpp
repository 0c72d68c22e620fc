#include <CLI11.hpp>

#include <iostream>

#include "btq/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"btq - Berezin-Toeplitz quantization laboratory"};

  std::vector<std::string> study_args;
  std::string config_path, out_dir, cache_dir, p_arg;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 0;

  app.add_option("studies", study_args,
                 "studies to run: gap product commutator kernel symbol density "
                 "fock-verify constants all");
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides [io] out)");
  app.add_option("--cache", cache_dir, "cache directory (overrides [io] cache and $BTQ_CACHE_DIR)");
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t v) { seed = v; seed_given = true; }, "RNG seed override");
  app.add_option("--p", p_arg, "comma-separated p list override");
  app.add_option("--jobs", jobs, "worker pool size");

  CLI11_PARSE(app, argc, argv);

  try {
    btq::RunConfig cfg = btq::parse_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (seed_given) cfg.seed = seed;
    if (jobs > 0) cfg.jobs = jobs;
    if (!p_arg.empty()) {
      cfg.p_list.clear();
      std::stringstream ss(p_arg);
      std::string item;
      while (std::getline(ss, item, ',')) cfg.p_list.push_back(std::stoi(item));
    }

    std::vector<std::string> names = study_args;
    if (names.empty()) names = cfg.studies;
    if (names.empty()) {
      std::cerr << "no studies selected (pass study names or set [run] studies)\n";
      return 1;
    }
    std::vector<btq::StudyId> studies;
    for (const auto& name : names) {
      if (name == "all") {
        studies = btq::all_studies();
        break;
      }
      auto id = btq::parse_study_name(name);
      if (!id) {
        std::cerr << "unknown study '" << name << "'\n";
        return 1;
      }
      studies.push_back(*id);
    }
    return btq::run_studies(cfg, studies, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
