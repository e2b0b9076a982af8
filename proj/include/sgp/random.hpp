#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sgp {

/// Philox4x32-10 block: encrypts a 128-bit counter under a 64-bit key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based stream of 64-bit words keyed by (master_seed, stream_index).
///
/// The seed is the Philox key; the stream index occupies the upper half of
/// the 128-bit counter and the block number the lower half, so streams never
/// share a block and can be created in any order. Satisfies
/// UniformRandomBitGenerator.
class RandomSource {
public:
    using result_type = std::uint64_t;

    RandomSource(std::uint64_t master_seed, std::uint64_t stream_index);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }
    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;  // 32-bit lanes consumed from buffer_, in pairs
};

inline RandomSource derive_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
    return RandomSource(master_seed, stream_index);
}

}  // namespace sgp
