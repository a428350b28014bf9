#pragma once

#include "sra/core/model.hpp"

#include <cstdint>
#include <iterator>
#include <random>

namespace sra::detail {

inline std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi)
{
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline bool coin(std::mt19937_64& rng, double p = 0.5)
{
    return std::bernoulli_distribution(p)(rng);
}

template <typename V>
const auto& pick(std::mt19937_64& rng, const V& v)
{
    return v[static_cast<std::size_t>(draw(rng, 0, static_cast<std::int64_t>(std::size(v)) - 1))];
}

inline std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform value of a mutable scalar type: Bool and Enum over their domain,
// Int in [-3, 3], Timer in [0, 3].
std::int64_t random_scalar(const Model& m, const Type& t, std::mt19937_64& rng);

// A different value of the same type.
std::int64_t perturb(const Model& m, const Type& t, std::int64_t v);

} // namespace sra::detail
