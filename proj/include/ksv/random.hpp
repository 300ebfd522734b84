#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ksv {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Per-check stream: the run seed combined with a stable label, so adding a check never
/// perturbs the samples of another. Uniform draws use only raw 64-bit output, which is
/// portable across standard libraries.
class Rng {
  public:
    Rng(std::uint64_t seed, std::string_view label) : engine_(seed ^ fnv1a(label)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace ksv
