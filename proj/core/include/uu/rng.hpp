#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace uu {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent child seed for a named purpose ("data", "init", "shuffle", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace uu
