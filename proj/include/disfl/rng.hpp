// rng.hpp
// Seeded draws with fully specified arithmetic, so a given seed produces the
// same sequence on every platform/toolchain.

#pragma once

#include <cstdint>
#include <random>

namespace disfl {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::size_t below(std::size_t n) {   // uniform in [0, n); n > 0
    return static_cast<std::size_t>(engine_() % n);
  }

  std::size_t in_range(std::size_t lo, std::size_t hi) {   // inclusive
    return lo + below(hi - lo + 1);
  }

  double unit() {   // uniform in [0, 1), 53-bit resolution
    return (engine_() >> 11) * (1.0 / 9007199254740992.0);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace disfl
