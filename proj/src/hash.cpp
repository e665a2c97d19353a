#include "netreplica/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace netreplica {

namespace {

std::string to_hex(std::span<const unsigned char> digest) {
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (const unsigned char b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr)) {
    throw std::runtime_error("sha256: digest failed");
  }
  return to_hex({digest.data(), len});
}

std::string sha256_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sha256: cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("sha256: ctx alloc failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  return to_hex({digest.data(), len});
}

uint64_t flow_key(uint32_t src_addr, uint16_t src_port, uint32_t dst_addr, uint16_t dst_port,
                  uint8_t protocol) {
  // Canonical endpoint order: smaller (addr, port) pair first.
  uint64_t a = (static_cast<uint64_t>(src_addr) << 16) | src_port;
  uint64_t b = (static_cast<uint64_t>(dst_addr) << 16) | dst_port;
  if (b < a) std::swap(a, b);
  char bytes[17];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>(a >> (8 * i));
  for (int i = 0; i < 8; ++i) bytes[8 + i] = static_cast<char>(b >> (8 * i));
  bytes[16] = static_cast<char>(protocol);
  return fnv1a64(std::string_view(bytes, sizeof bytes));
}

}  // namespace netreplica
