#include "maxcorr/rng.hpp"

namespace maxcorr {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t substream) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ mix64(stream + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ mix64(substream + 0x8cb92ba72f3d8dd7ULL));
    return h;
}

std::uint64_t hash_key(std::string_view key) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : key) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace maxcorr
