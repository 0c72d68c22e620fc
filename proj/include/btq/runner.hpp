#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "btq/config.hpp"

namespace btq {

enum class StudyId { Gap, Product, Commutator, Kernel, Symbol, Density, FockVerify, Constants };

std::optional<StudyId> parse_study_name(const std::string& name);
std::vector<StudyId> all_studies();
std::string study_name(StudyId id);
std::vector<int> default_p_list(StudyId id);

// Executes the selected studies: resolves grids, fans subspace computation
// out over a bounded worker pool, funnels all file writes through the calling
// thread, and writes one CSV + JSON pair per study under the out directory.
// Returns the process exit code: 0 when every verdict passes (or vanishes
// exactly), 2 when any study is inconclusive, 1 on error or failed verdict.
int run_studies(const RunConfig& cfg, const std::vector<StudyId>& studies,
                std::ostream& log);

}  // namespace btq
