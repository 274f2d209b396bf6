#ifndef ORIGAMI_RNG_HPP
#define ORIGAMI_RNG_HPP

#include <cstdint>

#include "origami/qformat.hpp"

// Deterministic generator used for seeded filters, biases and inputs.
// splitmix64-based so streams are identical across platforms and
// standard libraries.

namespace origami {

std::uint64_t splitmix64(std::uint64_t& state);

// Decorrelated sub-seed for (seed, stream) pairs.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next() { return splitmix64(state_); }
    // uniform in [lo, hi]
    std::int64_t uniform(std::int64_t lo, std::int64_t hi);
    // uniform raw code over the full format range
    std::int32_t code(const QFormat& fmt) {
        return static_cast<std::int32_t>(uniform(fmt.min_raw(), fmt.max_raw()));
    }
    double real01();

  private:
    std::uint64_t state_;
};

}  // namespace origami

#endif
