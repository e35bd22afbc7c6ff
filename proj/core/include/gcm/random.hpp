#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gcm {

using Engine = std::mt19937_64;

/// Mixes a root seed with stream coordinates into an independent 64-bit seed.
/// The result depends only on the arguments, never on call order, so any
/// (seed, index...) tuple names one reproducible substream.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path);

inline Engine make_engine(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    return Engine(derive_seed(root, path));
}

}  // namespace gcm
