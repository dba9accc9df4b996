#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fieldstore {

using Bytes = std::vector<std::uint8_t>;

std::uint32_t crc32(const void* data, std::size_t len);
inline std::uint32_t crc32(const Bytes& b) { return crc32(b.data(), b.size()); }

std::string to_hex32(std::uint32_t v);  // 8 lowercase hex chars

std::uint64_t fnv1a64(std::string_view s);

// Fast deterministic byte-stream generator (splitmix64 core).
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  void fill(std::uint8_t* dst, std::size_t len);

 private:
  std::uint64_t state_;
};

// Parses sizes like "4096", "64KiB", "1MiB", "2GiB" (1024-based). Plain "B"
// suffix accepted. Throws std::invalid_argument on anything else.
std::uint64_t parse_size(std::string_view text);

}  // namespace fieldstore
