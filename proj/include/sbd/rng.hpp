#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sbd {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: every output block is a pure function of (key, counter).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Counter operator()(Counter ctr) const { return generate(ctr, key_); }

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

    /// Two independent standard normals for counter (block, step, replica).
    std::array<double, 2> normals(std::uint32_t block, std::uint32_t step, std::uint64_t replica) const {
        const Counter out = (*this)({block, step, static_cast<std::uint32_t>(replica),
                                     static_cast<std::uint32_t>(replica >> 32)});
        const double u1 = to_open_unit((static_cast<std::uint64_t>(out[0]) << 32) | out[1]);
        const double u2 = to_open_unit((static_cast<std::uint64_t>(out[2]) << 32) | out[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

private:
    static double to_open_unit(std::uint64_t x) { return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53; }

    static constexpr std::uint32_t kM0 = 0xD2511F53;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57;
    static constexpr std::uint32_t kW0 = 0x9E3779B9;
    static constexpr std::uint32_t kW1 = 0xBB67AE85;

    Key key_;
};

}  // namespace sbd
