#pragma once

#include <string>

#include "btq/eigensolve.hpp"
#include "btq/model.hpp"

namespace btq {

// One cache file per (model hash, p, M, r): a text header carrying every
// parameter, the format version and a payload checksum, followed by raw
// little-endian 64-bit floats (eigenvalues, residuals, then interleaved re/im
// basis entries, column-major).  Hits reproduce downstream reports
// bit-identically; corrupt payloads and stale versions are treated as misses.
std::uint64_t eigencache_model_hash(const SymplecticModel& m, std::uint64_t seed, int r);

std::string eigencache_filename(const std::string& dir, std::uint64_t model_hash, int p,
                                int M, int r);

enum class CacheProbe { Hit, Miss, Corrupt, StaleVersion };

CacheProbe eigencache_load(const std::string& path, SpectralSubspace& out);
void eigencache_store(const std::string& path, const SpectralSubspace& s,
                      std::uint64_t model_hash, int p, int M, int r, std::uint64_t seed);

}  // namespace btq
