#pragma once

#include <string>

#include "btq/semiclassics.hpp"

namespace btq {

// CSV: one row per p with the metric and every extra column.
void write_report_csv(const std::string& path, const ConvergenceReport& rep);

// JSON summary; the timestamp is isolated in its own key so determinism
// checks can exclude it.
std::string report_json(const ConvergenceReport& rep, const std::string& config_hash,
                        const std::string& timestamp);
void write_text_file(const std::string& path, const std::string& content);

void write_constants_csv(const std::string& path, const ConstantTrackingTable& tab);
std::string constants_json(const ConstantTrackingTable& tab, const std::string& config_hash,
                           const std::string& timestamp, int sign);

std::string iso_timestamp();

}  // namespace btq
