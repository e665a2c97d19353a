#include "netreplica/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>

#include "netreplica/hash.hpp"

namespace netreplica::ingest {

namespace {

constexpr uint32_t kPcapMagicUs = 0xa1b2c3d4u;
constexpr uint32_t kPcapMagicUsSwapped = 0xd4c3b2a1u;
constexpr uint32_t kPcapMagicNs = 0xa1b23c4du;
constexpr uint32_t kPcapMagicNsSwapped = 0x4d3cb2a1u;

constexpr uint32_t kLinktypeEthernet = 1;
constexpr uint32_t kLinktypeRawIp = 101;

uint32_t bswap32(uint32_t v) { return __builtin_bswap32(v); }
uint16_t load_be16(const unsigned char* p) { return static_cast<uint16_t>(p[0] << 8 | p[1]); }
uint32_t load_be32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) << 24 | static_cast<uint32_t>(p[1]) << 16 |
         static_cast<uint32_t>(p[2]) << 8 | p[3];
}

struct PcapReader {
  std::vector<unsigned char> data;
  bool swapped = false;
  bool nanos = false;
  uint32_t linktype = 0;

  uint32_t u32(size_t off) const {
    uint32_t v;
    std::memcpy(&v, data.data() + off, 4);
    return swapped ? bswap32(v) : v;
  }
};

// Fills addressing fields from an IPv4 header at pkt[off..]; returns false
// for non-IPv4 payloads (ARP, IPv6, ...).
bool parse_ipv4_packet(const unsigned char* pkt, size_t len, PacketRecord& rec) {
  if (len < 20) return false;
  const uint8_t version = pkt[0] >> 4;
  if (version != 4) return false;
  const size_t ihl = static_cast<size_t>(pkt[0] & 0xf) * 4;
  if (ihl < 20 || len < ihl) return false;
  rec.src_addr = load_be32(pkt + 12);
  rec.dst_addr = load_be32(pkt + 16);
  const uint8_t proto = pkt[9];
  if (proto == 6) {
    rec.protocol = Protocol::Tcp;
  } else if (proto == 17) {
    rec.protocol = Protocol::Udp;
  } else {
    rec.protocol = Protocol::Other;
  }
  if (rec.protocol != Protocol::Other && len >= ihl + 4) {
    rec.src_port = load_be16(pkt + ihl);
    rec.dst_port = load_be16(pkt + ihl + 2);
  }
  return true;
}

std::vector<PacketRecord> parse_pcap(const std::string& path, uint64_t* non_ip_dropped) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  PcapReader r;
  r.data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());

  if (r.data.size() < 24) throw ParseError("truncated pcap global header", r.data.size());
  uint32_t magic;
  std::memcpy(&magic, r.data.data(), 4);
  switch (magic) {
    case kPcapMagicUs:
      break;
    case kPcapMagicNs:
      r.nanos = true;
      break;
    case kPcapMagicUsSwapped:
      r.swapped = true;
      break;
    case kPcapMagicNsSwapped:
      r.swapped = true;
      r.nanos = true;
      break;
    default:
      throw ParseError("bad pcap magic", 0);
  }
  r.linktype = r.u32(20);
  if (r.linktype != kLinktypeEthernet && r.linktype != kLinktypeRawIp) {
    throw ParseError("unsupported pcap linktype " + std::to_string(r.linktype), 20);
  }

  std::vector<PacketRecord> records;
  size_t off = 24;
  while (off < r.data.size()) {
    if (off + 16 > r.data.size()) {
      throw ParseError("truncated packet record header", off);
    }
    const uint32_t ts_sec = r.u32(off);
    const uint32_t ts_frac = r.u32(off + 4);
    const uint32_t incl_len = r.u32(off + 8);
    const uint32_t orig_len = r.u32(off + 12);
    if (off + 16 + incl_len > r.data.size()) {
      throw ParseError("truncated packet data", off + 16);
    }
    const unsigned char* pkt = r.data.data() + off + 16;
    size_t len = incl_len;

    PacketRecord rec;
    rec.timestamp = static_cast<double>(ts_sec) +
                    static_cast<double>(ts_frac) * (r.nanos ? 1e-9 : 1e-6);
    rec.wire_bytes = orig_len;

    bool is_ip = false;
    if (r.linktype == kLinktypeRawIp) {
      is_ip = parse_ipv4_packet(pkt, len, rec);
    } else if (len >= 14) {
      uint16_t ethertype = load_be16(pkt + 12);
      size_t l3 = 14;
      // Skip one VLAN tag if present.
      if ((ethertype == 0x8100 || ethertype == 0x88a8) && len >= 18) {
        ethertype = load_be16(pkt + 16);
        l3 = 18;
      }
      if (ethertype == 0x0800) is_ip = parse_ipv4_packet(pkt + l3, len - l3, rec);
    }

    if (is_ip) {
      records.push_back(rec);
    } else if (non_ip_dropped) {
      ++*non_ip_dropped;
    }
    off += 16 + incl_len;
  }
  return records;
}

std::vector<PacketRecord> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<PacketRecord> records;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;

    std::array<std::string_view, 7> fields;
    size_t start = 0, field = 0;
    const std::string_view text(line);
    for (; field < fields.size(); ++field) {
      const size_t comma = text.find(',', start);
      if (comma == std::string_view::npos) {
        if (field != fields.size() - 1) break;
        fields[field] = text.substr(start);
        start = text.size();
      } else {
        fields[field] = text.substr(start, comma - start);
        start = comma + 1;
      }
    }
    if (field != fields.size()) {
      throw ParseError("expected 7 comma-separated fields at line " + std::to_string(lineno),
                       lineno);
    }

    PacketRecord rec;
    const auto num = [&](std::string_view s, auto& out, const char* name) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ParseError(std::string("bad ") + name + " at line " + std::to_string(lineno),
                         lineno);
      }
    };
    {
      // from_chars for double is locale-free and exact.
      double ts;
      num(fields[0], ts, "timestamp");
      rec.timestamp = ts;
    }
    const auto src = parse_ipv4(fields[1]);
    const auto dst = parse_ipv4(fields[2]);
    if (!src || !dst) throw ParseError("bad address at line " + std::to_string(lineno), lineno);
    rec.src_addr = *src;
    rec.dst_addr = *dst;
    num(fields[3], rec.src_port, "src port");
    num(fields[4], rec.dst_port, "dst port");
    if (fields[5] == "TCP") {
      rec.protocol = Protocol::Tcp;
    } else if (fields[5] == "UDP") {
      rec.protocol = Protocol::Udp;
    } else if (fields[5] == "OTHER") {
      rec.protocol = Protocol::Other;
      rec.src_port = 0;
      rec.dst_port = 0;
    } else {
      throw ParseError("bad protocol at line " + std::to_string(lineno), lineno);
    }
    num(fields[6], rec.wire_bytes, "bytes");
    records.push_back(rec);
  }
  return records;
}

}  // namespace

TraceFormat guess_format(const std::string& path) {
  if (path.size() >= 5 && path.ends_with(".pcap")) return TraceFormat::Pcap;
  return TraceFormat::PacketCsv;
}

std::vector<PacketRecord> parse_trace(const std::string& path, TraceFormat format,
                                      uint64_t* non_ip_dropped) {
  auto records = format == TraceFormat::Pcap ? parse_pcap(path, non_ip_dropped)
                                             : parse_csv(path);
  for (size_t i = 1; i < records.size(); ++i) {
    if (records[i].timestamp < records[i - 1].timestamp) {
      throw ParseError("timestamps regress at record " + std::to_string(i), i);
    }
  }
  return records;
}

Decomposition decompose(const std::vector<PacketRecord>& records, const IngestConfig& cfg) {
  if (cfg.internal_prefixes.empty()) {
    throw std::invalid_argument("decompose: internal_prefixes must be non-empty");
  }
  const auto is_internal = [&](Ipv4 ip) {
    return std::any_of(cfg.internal_prefixes.begin(), cfg.internal_prefixes.end(),
                       [&](const CidrPrefix& p) { return p.contains(ip); });
  };

  Decomposition out;
  for (const PacketRecord& rec : records) {
    const bool src_in = is_internal(rec.src_addr);
    const bool dst_in = is_internal(rec.dst_addr);

    Ipv4 host;
    Direction dir;
    if (src_in && !dst_in) {
      host = rec.src_addr;
      dir = Direction::Up;
    } else if (dst_in && !src_in) {
      host = rec.dst_addr;
      dir = Direction::Down;
    } else if (src_in && dst_in && !cfg.drop_non_crossing) {
      host = rec.src_addr;
      dir = Direction::Up;
    } else {
      if (src_in) {
        ++out.dropped.both_internal;
      } else {
        ++out.dropped.neither_internal;
      }
      out.dropped.bytes += rec.wire_bytes;
      continue;
    }

    auto& group = out.groups[host];
    group.host = host;
    group.packets.push_back({rec.timestamp, dir, rec.wire_bytes,
                             flow_key(rec.src_addr, rec.src_port, rec.dst_addr, rec.dst_port,
                                      static_cast<uint8_t>(rec.protocol))});
  }
  return out;
}

}  // namespace netreplica::ingest
