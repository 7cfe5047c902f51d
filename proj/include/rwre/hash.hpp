#pragma once

#include <cstdint>
#include <span>

namespace rwre
{

//! SplitMix64 output finalizer (a bijection on 64-bit words).
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

//! Stateless keyed hash of a lattice site.
inline std::uint64_t hash_site(std::uint64_t seed, std::span<const int> x)
{
    std::uint64_t h = mix64(seed + kGolden);
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        auto c = static_cast<std::uint64_t>(static_cast<std::int64_t>(x[i]));
        h = mix64(h ^ mix64(c + kGolden * (i + 1)));
    }
    return h;
}

//! Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t h)
{
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

//! Child seed for an independent stream (replica, resample, grid point...).
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t stream,
                                    std::uint64_t index = 0)
{
    std::uint64_t h = mix64(master ^ mix64(stream + kGolden));
    return mix64(h + kGolden * (index + 1));
}

// Stream tags for derive_seed.
inline constexpr std::uint64_t kReplicaStream = 0x7265706c69636173ull;
inline constexpr std::uint64_t kResampleStream = 0x726573616d706c65ull;
inline constexpr std::uint64_t kGridStream = 0x67726964706f696eull;

}  // namespace rwre
