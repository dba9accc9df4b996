#pragma once

#include <string>
#include <string_view>

namespace fieldstore {

// Filename-safe key encoding: bytes in [A-Za-z0-9._-] pass through, every
// other byte becomes %XX with uppercase hex. Bijective over byte strings.
std::string encode_key_filename(std::string_view key);

// Exact inverse of encode_key_filename. Throws StoreError{InvalidName} on
// input that is not a valid encoding.
std::string decode_key_filename(std::string_view encoded);

}  // namespace fieldstore
