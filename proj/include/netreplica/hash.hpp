#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace netreplica {

// SHA-256 of the input, lowercase hex.
std::string sha256_hex(std::string_view data);

// SHA-256 of a file's contents; throws std::runtime_error if unreadable.
std::string sha256_file_hex(const std::string& path);

// FNV-1a over raw bytes.
constexpr uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ull) {
  uint64_t h = seed;
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Order-independent 64-bit key for a 5-tuple: both directions of a flow hash
// to the same value.
uint64_t flow_key(uint32_t src_addr, uint16_t src_port, uint32_t dst_addr, uint16_t dst_port,
                  uint8_t protocol);

}  // namespace netreplica
