#include "silentdelivery/actors/selection.hpp"

#include <numeric>
#include <stdexcept>

namespace sd {

std::vector<std::uint32_t> select_uniform(std::uint32_t pool_size, std::uint32_t count, Rng& rng) {
  if (count > pool_size) throw std::invalid_argument("cannot select more mailmen than the pool holds");
  std::vector<std::uint32_t> pool(pool_size);
  std::iota(pool.begin(), pool.end(), 0u);
  // Partial Fisher-Yates: the first `count` slots end up a uniform sample.
  for (std::uint32_t i = 0; i < count; ++i) {
    auto j = static_cast<std::uint32_t>(rng.uniform(i, pool_size - 1));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

std::vector<std::uint32_t> layer_positions(std::uint32_t share_index, std::uint32_t l) {
  if (share_index < 1 || l < 1) throw std::invalid_argument("share index and depth start at 1");
  std::vector<std::uint32_t> out(l);
  for (std::uint32_t k = 0; k < l; ++k) out[k] = (share_index - 1) * l + k + 1;
  return out;
}

}  // namespace sd
