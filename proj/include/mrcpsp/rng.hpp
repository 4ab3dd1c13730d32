#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace mrcpsp {

// Deterministic random source. std::mt19937_64's output sequence is fixed by
// the standard, but the standard *distributions* are not, so all draws go
// through fixed arithmetic here to keep runs reproducible across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) -
                                                 static_cast<std::int64_t>(lo) + 1);
    constexpr auto u64_max = std::numeric_limits<std::uint64_t>::max();
    // rejection sampling: accept draws below the largest multiple of span
    const std::uint64_t rem = (u64_max % span + 1) % span;
    const std::uint64_t limit = u64_max - rem;
    std::uint64_t draw = engine_();
    while (draw > limit) draw = engine_();
    return lo + static_cast<int>(draw % span);
  }

  // Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mrcpsp
