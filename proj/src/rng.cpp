#include "origami/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace origami {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0x510e527fade682d1ULL + stream * 0x428a2f98d728ae22ULL);
    splitmix64(s);
    return splitmix64(s);
}

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::uniform: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
    // rejection-free modulo mapping; the bias is irrelevant for test data
    return lo + static_cast<std::int64_t>(next() % span);
}

double Rng::real01() { return std::ldexp(double(next() >> 11), -53); }

}  // namespace origami
