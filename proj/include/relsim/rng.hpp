#pragma once

#include <cstdint>
#include <string>

namespace relsim {

// 64-bit finalizer from SplitMix64 (Steele, Lea, Flood; Vigna's constants).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Counter-based SplitMix64 stream: output(i) = mix64(key + (i+1)*GOLDEN).
// Identical on every platform, seekable, and cheap to split: independent
// substreams are derived by hashing a stream identity into the key. This is
// exactly the SplitMix64 sequence seeded with `key`, addressed by counter.
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

    explicit CounterRng(std::uint64_t key) : key_(key), counter_(0) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

    // Uniform on (0, 1]: 53-bit mantissa, never returns 0 so -log(u) stays
    // finite.
    double next_unit() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

// Substream key for (master seed, replica, row identity):
// master ^ mix64-hash of the pair. Keyed to stable identities so that
// reordering unrelated inputs never perturbs a stream.
inline std::uint64_t derive_stream_key(std::uint64_t master_seed, std::uint64_t replica,
                                       std::uint64_t row_identity) {
    return master_seed ^ mix64(mix64(replica + 0x243f6a8885a308d3ull) + row_identity);
}

// FNV-1a over a string, used as the stable identity of fault-table rows.
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace relsim
