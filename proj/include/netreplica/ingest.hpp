#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "netreplica/types.hpp"

namespace netreplica::ingest {

enum class TraceFormat { Pcap, PacketCsv };

// Malformed trace content. `offset` is the byte offset of the defect for
// PCAP inputs and the 1-based line number for CSV inputs.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, uint64_t offset)
      : std::runtime_error(what), offset_(offset) {}
  uint64_t offset() const { return offset_; }

 private:
  uint64_t offset_;
};

struct IngestConfig {
  std::vector<CidrPrefix> internal_prefixes;  // non-empty
  bool drop_non_crossing = true;
};

// Packets that were excluded from the decomposition, by reason.
struct DropStats {
  uint64_t both_internal = 0;
  uint64_t neither_internal = 0;
  uint64_t packets() const { return both_internal + neither_internal; }
  uint64_t bytes = 0;
};

struct Decomposition {
  std::map<Ipv4, HostGroup> groups;
  DropStats dropped;
};

// Parses a capture into records in capture order. wire_bytes comes from the
// captured frame length. Non-IPv4 frames inside a PCAP are skipped and
// reported through *non_ip_dropped when provided.
std::vector<PacketRecord> parse_trace(const std::string& path, TraceFormat format,
                                      uint64_t* non_ip_dropped = nullptr);

TraceFormat guess_format(const std::string& path);

// Splits records into per-internal-host bidirectional groups:
//   src internal, dst external -> UP in src's group
//   dst internal, src external -> DOWN in dst's group
// Packets where both or neither endpoint is internal are dropped (and
// counted) when cfg.drop_non_crossing; with the flag off, both-internal
// packets are attributed to the source host as UP so each retained packet
// still lands in exactly one group.
Decomposition decompose(const std::vector<PacketRecord>& records, const IngestConfig& cfg);

}  // namespace netreplica::ingest
