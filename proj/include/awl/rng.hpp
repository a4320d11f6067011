#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace awl {

// Deterministic per-trajectory random streams.  A stream is identified by
// (master_seed, trajectory_id, purpose); distinct ids give statistically
// independent sequences and re-derivation reproduces the same sequence,
// independent of thread scheduling.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class RngStream {
public:
    RngStream(uint64_t master_seed, uint64_t trajectory_id,
              std::string_view purpose)
        : gen_(derive_key(master_seed, trajectory_id, purpose)) {}

    double gaussian() { return normal_(gen_); }
    double gaussian(double mean, double stddev) {
        return mean + stddev * normal_(gen_);
    }
    double uniform() { return uniform_(gen_); }
    uint64_t raw() { return gen_(); }

    static uint64_t derive_key(uint64_t master_seed, uint64_t trajectory_id,
                               std::string_view purpose) {
        uint64_t h = splitmix64(master_seed);
        h = splitmix64(h ^ splitmix64(trajectory_id));
        h = splitmix64(h ^ fnv1a64(purpose));
        return h;
    }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline RngStream derive_stream(uint64_t master_seed, uint64_t trajectory_id,
                               std::string_view purpose) {
    return RngStream(master_seed, trajectory_id, purpose);
}

}  // namespace awl
