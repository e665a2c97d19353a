#include "netreplica/types.hpp"

#include <cmath>

#include "netreplica/hash.hpp"

namespace netreplica {

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::Tcp:
      return "TCP";
    case Protocol::Udp:
      return "UDP";
    case Protocol::Other:
      return "OTHER";
  }
  return "?";
}

std::string_view to_string(Direction d) { return d == Direction::Up ? "UP" : "DOWN"; }

std::string profile_content_id(const CrossTrafficProfile& p) {
  std::string blob;
  blob.reserve(64 + p.series.bins.size() * 8);
  blob += p.source_trace;
  blob += '|';
  blob += p.prefix;
  blob += '|';
  blob += to_string(p.direction);
  blob += '|';
  // Times quantized to milliseconds keep the key integral.
  blob += std::to_string(static_cast<int64_t>(std::llround(p.window_start_s * 1000.0)));
  blob += '|';
  blob += std::to_string(static_cast<int64_t>(std::llround(p.window_duration_s * 1000.0)));
  blob += '|';
  blob += std::to_string(p.series.bin_width_ms);
  blob += '|';
  for (const uint64_t b : p.series.bins) {
    blob += std::to_string(b);
    blob += ',';
  }
  return sha256_hex(blob).substr(0, 32);
}

}  // namespace netreplica
