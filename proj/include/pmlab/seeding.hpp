#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pmlab {

/// FNV-1a over the bytes of a tag string.
std::uint64_t fnv1a64(std::string_view text);

/// SplitMix64 finalizer; bijective 64-bit mix.
std::uint64_t splitmix64(std::uint64_t x);

/// Stream seed derived from a master seed and a purpose tag.
/// Independent of evaluation order, so any parallel schedule that assigns
/// one engine per tag reproduces the serial results bit for bit.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

/// Engine seeded via derive_seed(master, tag).
std::mt19937_64 make_engine(std::uint64_t master, std::string_view tag);

}  // namespace pmlab
