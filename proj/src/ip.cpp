#include "netreplica/ip.hpp"

#include <charconv>

namespace netreplica {

std::optional<Ipv4> parse_ipv4(std::string_view text) {
  uint32_t out = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || v > 255 || next == p) return std::nullopt;
    out = (out << 8) | v;
    p = next;
    if (octet < 3) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return out;
}

std::string format_ipv4(Ipv4 addr) {
  return std::to_string((addr >> 24) & 0xff) + '.' + std::to_string((addr >> 16) & 0xff) + '.' +
         std::to_string((addr >> 8) & 0xff) + '.' + std::to_string(addr & 0xff);
}

std::string CidrPrefix::to_string() const { return format_ipv4(addr) + '/' + std::to_string(len); }

std::optional<CidrPrefix> CidrPrefix::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  const auto ip = parse_ipv4(text.substr(0, slash));
  if (!ip) return std::nullopt;
  int len = -1;
  const auto len_text = text.substr(slash + 1);
  auto [next, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
  if (ec != std::errc{} || next != len_text.data() + len_text.size() || len < 0 || len > 32) {
    return std::nullopt;
  }
  return CidrPrefix{apply_prefix(*ip, len), len};
}

}  // namespace netreplica
