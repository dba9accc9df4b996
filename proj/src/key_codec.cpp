#include "fieldstore/key_codec.hpp"

#include "fieldstore/object_api.hpp"

namespace fieldstore {

namespace {

bool is_safe_byte(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
}

int unhex_upper(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string encode_key_filename(std::string_view key) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(key.size());
  for (unsigned char c : key) {
    if (is_safe_byte(c)) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xf];
    }
  }
  return out;
}

std::string decode_key_filename(std::string_view encoded) {
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    char c = encoded[i];
    if (c == '%') {
      if (i + 2 >= encoded.size())
        throw StoreError(ErrorKind::InvalidName, "truncated %XX escape");
      int hi = unhex_upper(encoded[i + 1]);
      int lo = unhex_upper(encoded[i + 2]);
      if (hi < 0 || lo < 0)
        throw StoreError(ErrorKind::InvalidName, "bad %XX escape");
      out += static_cast<char>((hi << 4) | lo);
      i += 2;
    } else if (is_safe_byte(static_cast<unsigned char>(c))) {
      out += c;
    } else {
      throw StoreError(ErrorKind::InvalidName, "unencoded unsafe byte");
    }
  }
  return out;
}

}  // namespace fieldstore
