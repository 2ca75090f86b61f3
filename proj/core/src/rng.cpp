#include "didipw/rng.hpp"

#include "didipw/normal.hpp"

namespace didipw {

std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) noexcept {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64_next(s);
    s ^= (stream_id + 0x9E3779B97F4A7C15ULL) * 0xD6E8FEB86659FD93ULL;
    std::uint64_t b = splitmix64_next(s);
    return a ^ (b + 0x2545F4914F6CDD1DULL);
}

double Rng::next_unit() noexcept {
    // 53 random bits, offset by half an ulp so 0 and 1 are unreachable.
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::next_below(std::uint64_t n) noexcept {
    if (n <= 1) return 0;
    const std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
        const std::uint64_t r = next_u64();
        const __uint128_t m = static_cast<__uint128_t>(r) * n;
        const auto low = static_cast<std::uint64_t>(m);
        if (low >= threshold) {
            return static_cast<std::uint64_t>(m >> 64);
        }
    }
}

double Rng::next_normal() {
    return std_normal_quantile(next_unit());
}

} // namespace didipw
