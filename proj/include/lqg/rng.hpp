#pragma once

#include <array>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace lqg {

/// Identifies one reproducible random stream: (run seed, replicate index, purpose tag).
struct SeedRecord {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

// Purpose tags keep streams of different estimators disjoint under one seed.
namespace streams {
inline constexpr std::uint64_t spectral_field = 1;
inline constexpr std::uint64_t dgff = 2;
inline constexpr std::uint64_t roots = 3;
inline constexpr std::uint64_t first_passage = 4;
inline constexpr std::uint64_t euclidean = 5;
inline constexpr std::uint64_t measure_roots = 6;
}  // namespace streams

/// Random stream keyed by a SeedRecord. Streams with different keys are seeded
/// through std::seed_seq over all key words, so (seed, replicate) pairs map to
/// independent, order-free generators.
class Rng {
 public:
  explicit Rng(SeedRecord key) : key_(key), engine_(make_engine(key)) {}
  Rng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream)
      : Rng(SeedRecord{seed, replicate, stream}) {}

  const SeedRecord& key() const { return key_; }

  double normal() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  static std::mt19937_64 make_engine(SeedRecord k) {
    std::array<std::uint32_t, 6> words{
        static_cast<std::uint32_t>(k.seed), static_cast<std::uint32_t>(k.seed >> 32),
        static_cast<std::uint32_t>(k.replicate), static_cast<std::uint32_t>(k.replicate >> 32),
        static_cast<std::uint32_t>(k.stream), static_cast<std::uint32_t>(k.stream >> 32)};
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
  }

  SeedRecord key_;
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace lqg
