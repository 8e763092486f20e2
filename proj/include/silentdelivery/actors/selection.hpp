#pragma once

#include <cstdint>
#include <vector>

#include "silentdelivery/crypto/rng.hpp"

namespace sd {

/// `count` distinct pool indices drawn uniformly without replacement, in
/// draw order.
std::vector<std::uint32_t> select_uniform(std::uint32_t pool_size, std::uint32_t count, Rng& rng);

/// Recruitment positions (1-based) whose keys wrap share `share_index`
/// (1-based), innermost layer first. Shares use disjoint groups of l
/// consecutive positions.
std::vector<std::uint32_t> layer_positions(std::uint32_t share_index, std::uint32_t l);

/// Share (1-based) that recruitment position `position` helps wrap.
inline std::uint32_t share_of_position(std::uint32_t position, std::uint32_t l) { return (position - 1) / l + 1; }

}  // namespace sd
