#pragma once

#include <array>
#include <cstdint>

// Philox4x64-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3"),
// a counter-based generator: output = bijection_key(counter).  Any stream
// position is addressable directly, so results never depend on how work is
// split across threads.  Bit-compatible with Random123 and numpy.random.Philox.

namespace regpot::rng {

using Counter = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;

/// Ten-round Philox4x64 block function.
Counter philox4x64(Counter ctr, Key key);

/// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

/// Uniform double in (0, 1], safe as a log() argument.
inline double to_unit_open0(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

// Named streams keep independent consumers of one seed apart.
enum class Stream : std::uint64_t {
    Potential = 1,
    Rhs = 2,
    Paths = 3,
    InverseIteration = 4,
};

/// Random access view of one (seed, stream) sequence of 64-bit words.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, Stream stream, std::uint64_t substream = 0)
        : key_{seed, static_cast<std::uint64_t>(stream)}, substream_(substream) {}

    /// Word at position i: block i/4 of this substream, lane i%4.
    std::uint64_t word(std::uint64_t i) const {
        const Counter out = philox4x64({i / 4, substream_, 0, 0}, key_);
        return out[i % 4];
    }

    /// Four words of block b.
    Counter block(std::uint64_t b) const { return philox4x64({b, substream_, 0, 0}, key_); }

    double uniform(std::uint64_t i) const { return to_unit(word(i)); }

private:
    Key key_;
    std::uint64_t substream_;
};

/// Two standard normals from one pair of uniforms (Box-Muller).
std::array<double, 2> box_muller(std::uint64_t a, std::uint64_t b);

}  // namespace regpot::rng
