#pragma once

#include <cstdint>
#include <initializer_list>

namespace sqnf {

/// Counter-based splittable random stream.
///
/// Every value is a pure function of (key, counter), so streams derived by
/// the same key path produce identical sequences regardless of evaluation
/// order or thread schedule. Mixing is the 64-bit SplitMix finalizer.
class RngStream {
  public:
    explicit RngStream(std::uint64_t key) : key_(key) {}

    /// Value at an explicit counter position (does not advance the stream).
    std::uint64_t at(std::uint64_t counter) const { return mix(key_ + golden * (counter + 1)); }

    /// Uniform double in [0, 1) at an explicit counter position.
    double uniform_at(std::uint64_t counter) const {
        return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
    }

    std::uint64_t next_u64() { return at(counter_++); }

    double next_uniform() { return uniform_at(counter_++); }

    /// Uniform integer in [0, bound) by rejection-free scaling (bound <= 2^32).
    std::uint64_t next_below(std::uint64_t bound) {
        return (static_cast<unsigned __int128>(next_u64()) * bound) >> 64;
    }

    /// Child stream indexed by a tag; independent of this stream's counter.
    RngStream child(std::uint64_t tag) const { return RngStream(derive(key_, tag)); }

    static std::uint64_t derive(std::uint64_t key, std::uint64_t tag) {
        return mix(mix(key) ^ mix(tag ^ golden));
    }

    /// Key for a whole derivation path, e.g. {master, circuit_idx, draw_kind}.
    static std::uint64_t derive_path(std::uint64_t key, std::initializer_list<std::uint64_t> path) {
        for (std::uint64_t tag : path) key = derive(key, tag);
        return key;
    }

    std::uint64_t key() const { return key_; }

  private:
    static constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Fixed tags for the derivation paths used across the project. Keeping them
// in one table prevents accidental stream collisions between purposes.
namespace stream_tag {
inline constexpr std::uint64_t circuit = 1;
inline constexpr std::uint64_t theta = 2;
inline constexpr std::uint64_t twirl = 3;
inline constexpr std::uint64_t shots = 4;
inline constexpr std::uint64_t state = 5;
}  // namespace stream_tag

}  // namespace sqnf
