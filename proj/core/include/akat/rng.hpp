#pragma once

#include <array>
#include <cstdint>

namespace akat {

// Philox4x32-10 counter-based generator (Salmon et al. 2011). Streams are
// addressed by (seed, stream, counter), so parallel workers drawing from
// disjoint streams reproduce bit-identically regardless of scheduling.
std::array<uint32_t, 4> philox4x32(uint64_t counter, uint64_t stream, uint64_t seed);

class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

    uint32_t next_u32() {
        if (have_ == 0) {
            buf_ = philox4x32(ctr_++, stream_, seed_);
            have_ = 4;
        }
        return buf_[4 - have_--];
    }

    uint64_t next_u64() {
        uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
    uint64_t seed_, stream_;
    uint64_t ctr_ = 0;
    std::array<uint32_t, 4> buf_{};
    int have_ = 0;
};

}  // namespace akat
