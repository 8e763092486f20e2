#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sd {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Appends `more` to `out`.
inline void append(Bytes& out, ByteView more) { out.insert(out.end(), more.begin(), more.end()); }
void append_u64(Bytes& out, std::uint64_t v);
void append_u32(Bytes& out, std::uint32_t v);

/// Fixed-width byte string used for digests, addresses and keys.
template <std::size_t N>
struct FixedBytes {
  std::array<std::uint8_t, N> bytes{};

  static constexpr std::size_t size() { return N; }
  ByteView view() const { return {bytes.data(), N}; }
  std::string hex() const { return to_hex(view()); }

  static FixedBytes from_view(ByteView v) {
    if (v.size() != N) throw std::invalid_argument("fixed-width byte string has wrong length");
    FixedBytes out;
    std::copy(v.begin(), v.end(), out.bytes.begin());
    return out;
  }
  static FixedBytes from_hex_string(std::string_view h) { return from_view(from_hex(h)); }

  bool is_zero() const {
    for (auto b : bytes)
      if (b != 0) return false;
    return true;
  }

  auto operator<=>(const FixedBytes&) const = default;
};

struct Digest256 : FixedBytes<32> {
  static Digest256 from(const FixedBytes<32>& f) { return Digest256{f}; }
};

/// 20-byte account identifier.
struct Address : FixedBytes<20> {
  static Address from(const FixedBytes<20>& f) { return Address{f}; }
  static Address parse(std::string_view h) { return Address{FixedBytes<20>::from_hex_string(h)}; }
};

}  // namespace sd
