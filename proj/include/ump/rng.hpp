#pragma once

// Counter-based RNG (Philox4x32-10). Streams are addressed by
// (seed, sample_index, draw_counter), so any draw is reproducible without
// replaying the sequence and parallel samples never share state.

#include <cstdint>

namespace ump {

class PhiloxRng {
public:
    explicit PhiloxRng(std::uint64_t seed, std::uint64_t sample_index = 0)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          sample_index_(sample_index) {}

    void set_sample_index(std::uint64_t idx) {
        sample_index_ = idx;
        draw_ = 0;
    }

    // Round function applied 10 times; one 128-bit block per counter value.
    static void block(std::uint32_t k0, std::uint32_t k1, std::uint64_t c01, std::uint64_t c23,
                      std::uint32_t out[4]) {
        std::uint32_t x0 = static_cast<std::uint32_t>(c01);
        std::uint32_t x1 = static_cast<std::uint32_t>(c01 >> 32);
        std::uint32_t x2 = static_cast<std::uint32_t>(c23);
        std::uint32_t x3 = static_cast<std::uint32_t>(c23 >> 32);
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * x0;
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * x2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t y0 = hi1 ^ x1 ^ k0;
            const std::uint32_t y1 = lo1;
            const std::uint32_t y2 = hi0 ^ x3 ^ k1;
            const std::uint32_t y3 = lo0;
            x0 = y0;
            x1 = y1;
            x2 = y2;
            x3 = y3;
            k0 += kW0;
            k1 += kW1;
        }
        out[0] = x0;
        out[1] = x1;
        out[2] = x2;
        out[3] = x3;
    }

    // One uniform double in [0,1) per block: 53 bits from the first two words.
    double uniform() {
        std::uint32_t w[4];
        block(key0_, key1_, sample_index_, draw_++, w);
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(w[0]) << 32 | w[1]) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    std::uint64_t draw_counter() const { return draw_; }

    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

private:
    std::uint32_t key0_, key1_;
    std::uint64_t sample_index_ = 0;
    std::uint64_t draw_ = 0;
};

} // namespace ump
