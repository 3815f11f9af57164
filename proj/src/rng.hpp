#pragma once

#include <cstdint>
#include <random>

namespace gpsmc {

// splitmix64 finalizer. Used to derive independent substream seeds from one
// master seed, so that every (purpose, stage, particle) triple gets its own
// stream and results do not depend on evaluation order.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c);

namespace stream {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kMove = 2;
inline constexpr std::uint64_t kResample = 3;
inline constexpr std::uint64_t kSegment = 4;
inline constexpr std::uint64_t kCompare = 5;
inline constexpr std::uint64_t kRestart = 6;
inline constexpr std::uint64_t kSegmentFit = 7;
inline constexpr std::uint64_t kData = 8;
}  // namespace stream

// mt19937_64 with hand-rolled variate transforms. std::normal_distribution is
// implementation-defined, so drawing through it would break bitwise
// reproducibility across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // (0, 1]
  double uniform01_open_left() { return 1.0 - uniform01(); }

  // Box-Muller; two uniforms per draw, the sine branch is discarded.
  double normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gpsmc
