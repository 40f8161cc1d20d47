#pragma once

// Counter-based stream splitting.
//
// Every random quantity is drawn from its own std::mt19937_64 whose seed is a
// SplitMix64 hash of (master seed, stream id, sub-stream id). A bootstrap draw i
// uses stream (seed, i); a Monte Carlo replication r of cell c uses
// (master, hash(c), r). Results therefore do not depend on evaluation order or
// on how work is split across threads.

#include <cstdint>
#include <random>
#include <string_view>

namespace maxcorr {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t substream = 0);

inline Engine make_stream(std::uint64_t master, std::uint64_t stream, std::uint64_t substream = 0) {
    return Engine(derive_seed(master, stream, substream));
}

/// FNV-1a, used to turn configuration keys into stream ids.
std::uint64_t hash_key(std::string_view key);

}  // namespace maxcorr
