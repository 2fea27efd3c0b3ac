#pragma once

#include <cstdint>
#include <random>

namespace ofdmisac {

/// Independent sub-stream identifiers. Each consumer of randomness draws from
/// its own stream so that, e.g., adding a target never perturbs the data grid.
enum class Stream : std::uint64_t {
    Data = 1,
    PathPhase = 2,
    Noise = 3,
    Interference = 4,
};

/// Engine for (master seed, stream, index). Deterministic across runs.
std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

/// Child seed for trial `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ofdmisac
