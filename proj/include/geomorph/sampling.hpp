#pragma once

// Deterministic point sampling. A 64-bit splitmix generator keeps every
// stream reproducible across platforms; each (seed, stream name) pair gets
// an independent stream, so report contents do not depend on the order in
// which checks run.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "geomorph/errors.hpp"
#include "geomorph/fields.hpp"

namespace geomorph {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Independent stream for a named bundle/check under a global seed.
inline SplitMix64 stream_rng(std::uint64_t seed, const std::string& stream) {
  SplitMix64 mix(seed ^ fnv1a64(stream));
  // Decorrelate nearby seeds.
  mix.next();
  mix.next();
  return mix;
}

struct SampleRegion {
  Vector lo, hi;
  // Exclusion predicates return true when the point is admissible at the
  // given interior margin.
  std::vector<std::pair<std::string, DomainPredicate>> keep_if;
};

// Rejection-sample `count` points from the margin-shrunk box subject to
// the region's predicates. Throws SamplingError when the acceptance rate
// drops below 1%.
inline std::vector<Vector> sample_points(const SampleRegion& region, int count, std::uint64_t seed,
                                         const std::string& stream, double margin) {
  if (count <= 0) throw ConfigError("sample count must be positive");
  if (region.lo.size() != region.hi.size() || region.lo.size() == 0)
    throw ConfigError("sample region box is malformed");
  const int d = static_cast<int>(region.lo.size());
  for (int i = 0; i < d; ++i)
    if (region.hi[i] - region.lo[i] <= 2 * margin)
      throw ConfigError("sample region box collapses under the requested margin");
  SplitMix64 rng = stream_rng(seed, stream);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  const long max_attempts = 100L * count + 1000L;
  long attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (attempts++ >= max_attempts)
      throw SamplingError("rejection rate above 99% while sampling region for " + stream);
    Vector x(d);
    for (int i = 0; i < d; ++i) x[i] = rng.uniform(region.lo[i] + margin, region.hi[i] - margin);
    bool ok = true;
    for (const auto& [name, pred] : region.keep_if)
      if (!pred(x, margin)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace geomorph
