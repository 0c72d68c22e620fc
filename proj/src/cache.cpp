#include "btq/cache.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "btq/hash.hpp"

namespace btq {

namespace {
constexpr const char* kMagic = "BTQEIG 1";
}

std::uint64_t eigencache_model_hash(const SymplecticModel& m, std::uint64_t seed, int r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d|%.17g|%.17g|%d|%llu|%d", int(m.kind), m.B0, m.B1,
                m.flux_N, static_cast<unsigned long long>(seed), r);
  return fnv1a64(std::string(buf));
}

std::string eigencache_filename(const std::string& dir, std::uint64_t model_hash, int p,
                                int M, int r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "eig_%s_p%d_M%d_r%d.bin", hex64(model_hash).c_str(), p, M,
                r);
  return dir + "/" + buf;
}

void eigencache_store(const std::string& path, const SpectralSubspace& s,
                      std::uint64_t model_hash, int p, int M, int r, std::uint64_t seed) {
  const Eigen::Index n = s.basis.rows();
  const int d = s.dim();
  std::vector<double> payload;
  payload.reserve(5 + 2 * d + 2 * size_t(n) * d);
  payload.push_back(s.gap_edge);
  payload.push_back(s.window_cl);
  payload.push_back(s.gap_ratio);
  payload.push_back(s.vol_weight);
  payload.push_back(double(s.iterations));
  for (int i = 0; i < d; ++i) payload.push_back(s.eigenvalues[i]);
  for (int i = 0; i < d; ++i) payload.push_back(s.residuals[i]);
  for (int c = 0; c < d; ++c)
    for (Eigen::Index i = 0; i < n; ++i) {
      payload.push_back(s.basis(i, c).real());
      payload.push_back(s.basis(i, c).imag());
    }
  std::uint64_t crc = fnv1a64(payload.data(), payload.size() * sizeof(double));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << kMagic << "\n";
  char hdr[256];
  std::snprintf(hdr, sizeof hdr, "model=%s p=%d M=%d r=%d n=%ld d=%d seed=%llu crc=%s\n",
                hex64(model_hash).c_str(), p, M, r, long(n), d,
                static_cast<unsigned long long>(seed), hex64(crc).c_str());
  out << hdr;
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
}

CacheProbe eigencache_load(const std::string& path, SpectralSubspace& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return CacheProbe::Miss;
  std::string magic, header;
  if (!std::getline(in, magic)) return CacheProbe::Corrupt;
  if (magic != kMagic) return CacheProbe::StaleVersion;
  if (!std::getline(in, header)) return CacheProbe::Corrupt;

  long n = 0;
  int p = 0, M = 0, r = 0, d = 0;
  unsigned long long seed = 0;
  char model_hex[32] = {0}, crc_hex[32] = {0};
  if (std::sscanf(header.c_str(), "model=%31s p=%d M=%d r=%d n=%ld d=%d seed=%llu crc=%31s",
                  model_hex, &p, &M, &r, &n, &d, &seed, crc_hex) != 8)
    return CacheProbe::Corrupt;
  if (n <= 0 || d <= 0 || d > n) return CacheProbe::Corrupt;

  size_t count = 5 + 2 * size_t(d) + 2 * size_t(n) * d;
  std::vector<double> payload(count);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<size_t>(in.gcount()) != count * sizeof(double)) return CacheProbe::Corrupt;

  std::uint64_t crc = fnv1a64(payload.data(), payload.size() * sizeof(double));
  if (hex64(crc) != crc_hex) return CacheProbe::Corrupt;

  size_t k = 0;
  out.gap_edge = payload[k++];
  out.window_cl = payload[k++];
  out.gap_ratio = payload[k++];
  out.vol_weight = payload[k++];
  out.iterations = static_cast<int>(payload[k++]);
  out.eigenvalues.resize(d);
  for (int i = 0; i < d; ++i) out.eigenvalues[i] = payload[k++];
  out.residuals.resize(d);
  for (int i = 0; i < d; ++i) out.residuals[i] = payload[k++];
  out.basis.resize(n, d);
  for (int c = 0; c < d; ++c)
    for (long i = 0; i < n; ++i) {
      double re = payload[k++], im = payload[k++];
      out.basis(i, c) = cplx(re, im);
    }
  return CacheProbe::Hit;
}

}  // namespace btq
