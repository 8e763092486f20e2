#pragma once

#include <initializer_list>

#include "silentdelivery/crypto/bytes.hpp"

namespace sd {

/// 256-bit cryptographic hash (BLAKE2b-256).
Digest256 hash256(ByteView data);

/// Hash of a tuple of fields. Each field is length-prefixed, so
/// ("ab","c") and ("a","bc") hash differently.
Digest256 hash_fields(std::initializer_list<ByteView> fields);

}  // namespace sd
