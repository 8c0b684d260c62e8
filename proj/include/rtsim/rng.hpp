#pragma once

#include <cstdint>
#include <random>

namespace rtsim {

// All randomized operations take an explicit stream so callers control
// reproducibility. One stream per worker; never share across threads.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

// Derives an independent child seed from a master stream.
inline std::uint64_t spawn_seed(Rng& master) { return master(); }

}  // namespace rtsim
