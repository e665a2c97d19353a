#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace netreplica {

// IPv4 address in host byte order.
using Ipv4 = uint32_t;

std::optional<Ipv4> parse_ipv4(std::string_view text);
std::string format_ipv4(Ipv4 addr);

// Network mask for a prefix length in [0, 32].
constexpr uint32_t prefix_mask(int len) {
  return len == 0 ? 0u : ~uint32_t{0} << (32 - len);
}

constexpr Ipv4 apply_prefix(Ipv4 addr, int len) { return addr & prefix_mask(len); }

struct CidrPrefix {
  Ipv4 addr = 0;  // already masked
  int len = 0;

  bool contains(Ipv4 ip) const { return apply_prefix(ip, len) == addr; }
  std::string to_string() const;

  static std::optional<CidrPrefix> parse(std::string_view text);

  friend bool operator==(const CidrPrefix&, const CidrPrefix&) = default;
};

}  // namespace netreplica
