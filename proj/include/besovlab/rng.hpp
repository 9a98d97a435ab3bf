#pragma once

#include <cstdint>
#include <random>

namespace besovlab {

// splitmix64 finalizer; used to spread seed material into sub-stream keys,
// never as the generator itself.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Decorrelated key for (seed, replicate, coordinate) so replicates and
// coordinates can be generated in any order with identical results.
inline std::uint64_t substream_key(std::uint64_t seed, std::uint64_t replicate,
                                   std::uint64_t coordinate) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ (0x5851f42d4c957f2dULL * (replicate + 1)));
    k = splitmix64(k ^ (0x14057b7ef767814fULL * (coordinate + 1)));
    return k;
}

// Deterministic stream of standard normals.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t coordinate)
        : engine_(substream_key(seed, replicate, coordinate)) {}

    double operator()() { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace besovlab
