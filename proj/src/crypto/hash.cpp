#include "silentdelivery/crypto/hash.hpp"

#include <sodium.h>

namespace sd {

Digest256 hash256(ByteView data) {
  Digest256 out;
  crypto_generichash(out.bytes.data(), out.bytes.size(), data.data(), data.size(), nullptr, 0);
  return out;
}

Digest256 hash_fields(std::initializer_list<ByteView> fields) {
  crypto_generichash_state state;
  crypto_generichash_init(&state, nullptr, 0, 32);
  for (auto f : fields) {
    Bytes len;
    append_u64(len, f.size());
    crypto_generichash_update(&state, len.data(), len.size());
    crypto_generichash_update(&state, f.data(), f.size());
  }
  Digest256 out;
  crypto_generichash_final(&state, out.bytes.data(), out.bytes.size());
  return out;
}

}  // namespace sd
