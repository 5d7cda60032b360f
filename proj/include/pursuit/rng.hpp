#pragma once

#include <cstdint>
#include <random>

namespace pursuit {

using Rng = std::mt19937_64;

/// Independent random streams derived from one run seed.
enum class Stream : std::uint32_t {
    EnvInit = 1,
    Exploration = 2,
    WeightInit = 3,
    BufferSampling = 4,
};

/// Child stream for `stream` under `seed`. The 64-bit seed is split into two
/// 32-bit words and fed with the stream tag through std::seed_seq, whose
/// mixing algorithm is fixed by the standard, so streams are reproducible
/// across platforms and mutually decorrelated.
[[nodiscard]] inline Rng make_stream(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

}  // namespace pursuit
