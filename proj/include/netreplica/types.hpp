#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netreplica/ip.hpp"

namespace netreplica {

enum class Protocol : uint8_t { Tcp = 6, Udp = 17, Other = 0 };
enum class Direction : uint8_t { Up, Down };

std::string_view to_string(Protocol p);
std::string_view to_string(Direction d);

// One captured packet. Ports are 0 when the protocol is Other.
struct PacketRecord {
  double timestamp = 0.0;  // seconds
  Ipv4 src_addr = 0;
  Ipv4 dst_addr = 0;
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  Protocol protocol = Protocol::Other;
  uint64_t wire_bytes = 0;
};

// One packet attributed to an internal host, after decomposition.
struct HostPacket {
  double timestamp = 0.0;
  Direction direction = Direction::Up;
  uint64_t wire_bytes = 0;
  uint64_t flow_key = 0;
};

// Bidirectional packets of one internal host, ordered by timestamp.
struct HostGroup {
  Ipv4 host = 0;
  std::vector<HostPacket> packets;
};

// Byte counts at a fixed bin width. All series from one trace share the same
// start time, so bin boundaries line up across hosts and prefixes.
struct ByteSeries {
  uint32_t bin_width_ms = 100;
  double start_time_s = 0.0;
  std::vector<uint64_t> bins;

  double duration_s() const { return static_cast<double>(bins.size()) * bin_width_ms / 1000.0; }
};

struct ProfileMetrics {
  double mean_throughput_bps = 0.0;
  double max_throughput_bps = 0.0;
  double pmr = 0.0;    // max / mean
  double pmr95 = 0.0;  // 95th-percentile-bin throughput / mean (nearest-rank)
  double cov = 0.0;    // population std / mean of bin bytes
  uint64_t host_count = 0;
  uint64_t flow_count = 0;
  double asymmetry = 0.0;  // this direction's bytes / both directions'
  uint64_t toggle_count = 0;  // populated by replay preparation

  friend bool operator==(const ProfileMetrics&, const ProfileMetrics&) = default;
};

// A windowed byte-count series cut from one prefix-tree node, plus the
// indexed attribute metrics used for selection.
struct CrossTrafficProfile {
  std::string id;  // stable content hash
  std::string source_trace;
  std::string prefix;  // CIDR text, e.g. "10.1.2.0/24"
  Direction direction = Direction::Down;
  double window_start_s = 0.0;
  double window_duration_s = 0.0;
  ByteSeries series;
  ProfileMetrics metrics;
};

// Content hash for a profile; everything that defines the replayable window
// participates, so identical windows dedup and any edit changes the id.
std::string profile_content_id(const CrossTrafficProfile& p);

}  // namespace netreplica
