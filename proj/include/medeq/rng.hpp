#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace medeq {

// mt19937_64 output is fixed by the standard; the std:: distributions are
// not, so sampling goes through the helpers below to keep files
// byte-identical across standard libraries.
using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t hash_string(std::string_view s);

// Uniform double in [0, 1).
double uniform01(Engine& eng);

// Index drawn proportionally to non-negative weights. Weights need not sum
// to one; at least one must be positive.
std::size_t sample_index(Engine& eng, std::span<const double> weights);

// Uniform integer in [0, n).
std::size_t uniform_index(Engine& eng, std::size_t n);

}  // namespace medeq
