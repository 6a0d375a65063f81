#pragma once

#include <cstdint>
#include <random>

namespace molmimo {

using Engine = std::mt19937_64;

/// Independent engine for stream `stream` of a master seed. Streams are keyed
/// by (seed, domain, stream) only, so the engine a molecule or realization
/// sees does not depend on which thread runs it or in what order.
Engine stream_engine(std::uint64_t seed, std::uint64_t domain, std::uint64_t stream);

/// Stream domains keep unrelated consumers of one master seed apart.
namespace domain {
inline constexpr std::uint64_t molecule = 0x6d6f6c;     // particle trajectories
inline constexpr std::uint64_t emitter = 0x656d69;      // per-emitter sub-seeds
inline constexpr std::uint64_t realization = 0x726c7a;  // BER realizations
inline constexpr std::uint64_t channel = 0x63686e;      // standalone channel draws
}  // namespace domain

/// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace molmimo
