#pragma once

// Counter-based random streams. Every test (or gene) gets its own stream keyed
// by (seed, id), so draws do not depend on processing order or thread count.

#include <cstdint>
#include <limits>
#include <string_view>

namespace bfdr {

constexpr std::uint64_t splitmix_mix(std::uint64_t x) noexcept
{
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) noexcept
{
    return splitmix_mix(splitmix_mix(seed ^ 0x5851f42d4c957f2dULL) + splitmix_mix(index + 0x9e3779b97f4a7c15ULL));
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::string_view id) noexcept
{
    return stream_key(seed, fnv1a(id));
}

// Output k of a stream is mix(key + (k + 1) * golden); a pure function of
// (key, counter). Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

    constexpr result_type operator()() noexcept
    {
        ++counter_;
        return splitmix_mix(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    constexpr std::uint64_t counter() const noexcept { return counter_; }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(CounterRng& rng) noexcept
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace bfdr
