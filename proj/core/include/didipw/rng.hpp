#pragma once

#include <cstdint>

namespace didipw {

// Deterministic random streams built on SplitMix64. The library never uses
// std::random distributions: their output is implementation-defined, and the
// reproducibility contract (same seed => bit-identical results, serial or
// parallel) requires draws we control end to end.

std::uint64_t splitmix64_next(std::uint64_t& state) noexcept;

// Derives an independent stream seed from (seed, stream_id). Replicate b of
// a bootstrap run uses derive_seed(seed, b) so parallel and serial execution
// consume identical streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept { return splitmix64_next(state_); }

    // Uniform double in the open interval (0,1); safe input for quantile
    // transforms.
    double next_unit() noexcept;

    // Uniform integer in [0, n), n >= 1. Lemire multiply-shift rejection,
    // unbiased.
    std::uint64_t next_below(std::uint64_t n) noexcept;

    // Standard normal draw by inverse-CDF transform.
    double next_normal();

private:
    std::uint64_t state_;
};

} // namespace didipw
