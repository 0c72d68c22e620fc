#include "btq/report_io.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>

#include "btq/errors.hpp"

namespace btq {

using ordered_json = nlohmann::ordered_json;

void write_report_csv(const std::string& path, const ConvergenceReport& rep) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << "p,M,d,metric";
  for (const auto& [name, _] : rep.extra) out << "," << name;
  out << "\n";
  char buf[64];
  for (size_t i = 0; i < rep.p.size(); ++i) {
    out << rep.p[i] << "," << rep.M[i] << "," << rep.d[i];
    std::snprintf(buf, sizeof buf, ",%.17g", rep.metric[i]);
    out << buf;
    for (const auto& [_, col] : rep.extra) {
      std::snprintf(buf, sizeof buf, ",%.17g", col[i]);
      out << buf;
    }
    out << "\n";
  }
}

std::string report_json(const ConvergenceReport& rep, const std::string& config_hash,
                        const std::string& timestamp) {
  ordered_json j;
  j["study"] = rep.study;
  j["config_hash"] = config_hash;
  j["timestamp"] = timestamp;
  j["model"] = rep.model_desc;
  j["symbols"] = rep.symbol_ids;
  j["sign_convention"] = rep.sign_convention;
  j["p"] = rep.p;
  j["M"] = rep.M;
  j["d"] = rep.d;
  j["metric"] = rep.metric;
  for (const auto& [name, col] : rep.extra) j[name] = col;
  j["fit_kind"] = rep.fit_kind;
  j["slope"] = rep.slope;
  j["intercept"] = rep.intercept;
  j["r2"] = rep.r2;
  if (rep.refinement_delta >= 0) j["refinement_delta"] = rep.refinement_delta;
  j["verdict"] = to_string(rep.verdict);
  j["verdict_detail"] = rep.verdict_detail;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

void write_constants_csv(const std::string& path, const ConstantTrackingTable& tab) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << "lambda,c_hat,slope";
  for (int p : tab.p) out << ",defect_p" << p;
  out << "\n";
  char buf[64];
  for (size_t i = 0; i < tab.lambda.size(); ++i) {
    out << tab.lambda[i];
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g", tab.c_hat[i], tab.slope[i]);
    out << buf;
    for (size_t pi = 0; pi < tab.p.size(); ++pi) {
      std::snprintf(buf, sizeof buf, ",%.17g", tab.defects(i, pi));
      out << buf;
    }
    out << "\n";
  }
}

std::string constants_json(const ConstantTrackingTable& tab, const std::string& config_hash,
                           const std::string& timestamp, int sign) {
  ordered_json j;
  j["study"] = "constants";
  j["config_hash"] = config_hash;
  j["timestamp"] = timestamp;
  j["sign_convention"] = sign;
  j["lambda"] = tab.lambda;
  j["p"] = tab.p;
  j["c_hat"] = tab.c_hat;
  j["slope"] = tab.slope;
  for (size_t i = 0; i < tab.lambda.size(); ++i) {
    std::vector<double> row(tab.p.size());
    for (size_t pi = 0; pi < tab.p.size(); ++pi) row[pi] = tab.defects(i, pi);
    j["defect_lambda" + std::to_string(tab.lambda[i])] = row;
  }
  j["verdict"] = "pass";
  j["verdict_detail"] = "descriptive study, no acceptance band";
  return j.dump(2) + "\n";
}

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[40];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace btq
