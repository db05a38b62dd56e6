#pragma once

#include <cstdint>

namespace setmarkov {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based stream keyed by (seed, sampleIndex, stepKey).
///
/// Word k of a stream is splitmix64 of a hash of the key and k, so any stream can be
/// regenerated from its key alone, independently of how work is split across threads.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t sampleIndex, std::uint64_t stepKey)
        : key_(splitmix64(splitmix64(splitmix64(seed) ^ sampleIndex) ^ (stepKey * 0xd1b54a32d192ed03ULL))) {}

    std::uint64_t next() { return splitmix64(key_ ^ splitmix64(counter_++)); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace setmarkov
