#include "fieldstore/util.hpp"

#include <zlib.h>

#include <charconv>
#include <cstring>
#include <stdexcept>

namespace fieldstore {

std::uint32_t crc32(const void* data, std::size_t len) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, static_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

std::string to_hex32(std::uint32_t v) {
  static const char* hex = "0123456789abcdef";
  std::string out(8, '0');
  for (int i = 7; i >= 0; --i) {
    out[i] = hex[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void Prng::fill(std::uint8_t* dst, std::size_t len) {
  while (len >= 8) {
    std::uint64_t v = next();
    std::memcpy(dst, &v, 8);
    dst += 8;
    len -= 8;
  }
  if (len > 0) {
    std::uint64_t v = next();
    std::memcpy(dst, &v, len);
  }
}

std::uint64_t parse_size(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty size");
  std::uint64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin)
    throw std::invalid_argument("bad size: " + std::string(text));
  std::string_view suffix(ptr, static_cast<std::size_t>(end - ptr));
  std::uint64_t mult = 1;
  if (suffix.empty() || suffix == "B")
    mult = 1;
  else if (suffix == "KiB")
    mult = 1024ULL;
  else if (suffix == "MiB")
    mult = 1024ULL * 1024;
  else if (suffix == "GiB")
    mult = 1024ULL * 1024 * 1024;
  else
    throw std::invalid_argument("bad size suffix: " + std::string(text));
  return value * mult;
}

}  // namespace fieldstore
