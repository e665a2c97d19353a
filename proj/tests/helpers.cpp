#include "helpers.hpp"

#include <sstream>

#include "netreplica/ip.hpp"
#include "netreplica/pipeline.hpp"

namespace testutil {

namespace {

void put32(std::string& out, uint32_t v, bool big_endian) {
  char b[4];
  if (big_endian) {
    b[0] = static_cast<char>(v >> 24);
    b[1] = static_cast<char>(v >> 16);
    b[2] = static_cast<char>(v >> 8);
    b[3] = static_cast<char>(v);
  } else {
    b[0] = static_cast<char>(v);
    b[1] = static_cast<char>(v >> 8);
    b[2] = static_cast<char>(v >> 16);
    b[3] = static_cast<char>(v >> 24);
  }
  out.append(b, 4);
}

void put16(std::string& out, uint16_t v, bool big_endian) {
  char b[2];
  if (big_endian) {
    b[0] = static_cast<char>(v >> 8);
    b[1] = static_cast<char>(v);
  } else {
    b[0] = static_cast<char>(v);
    b[1] = static_cast<char>(v >> 8);
  }
  out.append(b, 2);
}

void put_be16(std::string& out, uint16_t v) { put16(out, v, true); }
void put_be32(std::string& out, uint32_t v) { put32(out, v, true); }

}  // namespace

std::string build_pcap(const std::vector<PcapPacket>& packets, bool big_endian) {
  std::string out;
  put32(out, 0xa1b2c3d4u, big_endian);
  put16(out, 2, big_endian);
  put16(out, 4, big_endian);
  put32(out, 0, big_endian);  // thiszone
  put32(out, 0, big_endian);  // sigfigs
  put32(out, 65535, big_endian);
  put32(out, 1, big_endian);  // LINKTYPE_ETHERNET

  for (const auto& p : packets) {
    std::string frame;
    frame.append(12, '\0');           // MACs
    put_be16(frame, 0x0800);          // IPv4
    frame.push_back(0x45);            // version + IHL
    frame.push_back(0);               // DSCP
    put_be16(frame, 40);              // total length (unused by the parser)
    put_be32(frame, 0);               // id + frag
    frame.push_back(64);              // TTL
    frame.push_back(static_cast<char>(p.proto));
    put_be16(frame, 0);               // checksum
    put_be32(frame, *netreplica::parse_ipv4(p.src));
    put_be32(frame, *netreplica::parse_ipv4(p.dst));
    put_be16(frame, p.sport);
    put_be16(frame, p.dport);
    frame.append(16, '\0');  // rest of a TCP header

    const auto sec = static_cast<uint32_t>(p.timestamp);
    const auto usec = static_cast<uint32_t>((p.timestamp - sec) * 1e6 + 0.5);
    put32(out, sec, big_endian);
    put32(out, usec, big_endian);
    put32(out, static_cast<uint32_t>(frame.size()), big_endian);
    put32(out, p.wire_bytes, big_endian);
    out += frame;
  }
  return out;
}

std::string build_packet_csv(const std::vector<CsvPacket>& packets) {
  std::ostringstream out;
  out.precision(9);
  for (const auto& p : packets) {
    out << p.timestamp << ',' << p.src << ',' << p.dst << ',' << p.sport << ',' << p.dport << ','
        << p.proto << ',' << p.bytes << '\n';
  }
  return out.str();
}

netreplica::CrossTrafficProfile make_profile(const std::vector<uint64_t>& bins,
                                             uint32_t bin_width_ms, netreplica::Direction dir,
                                             const std::string& prefix,
                                             const std::string& source) {
  netreplica::CrossTrafficProfile p;
  p.source_trace = source;
  p.prefix = prefix;
  p.direction = dir;
  p.window_start_s = 0.0;
  p.window_duration_s = static_cast<double>(bins.size()) * bin_width_ms / 1000.0;
  p.series.bin_width_ms = bin_width_ms;
  p.series.start_time_s = 0.0;
  p.series.bins = bins;
  netreplica::ctp::WindowContext ctx;
  ctx.host_count = 1;
  ctx.flow_count = 1;
  ctx.paired_direction_bytes = 0;
  p.metrics = netreplica::ctp::compute_metrics(p.series, ctx);
  p.id = netreplica::profile_content_id(p);
  return p;
}

std::vector<netreplica::CrossTrafficProfile> random_profiles(std::mt19937_64& rng, size_t count,
                                                             size_t bins, uint64_t max_bin) {
  std::vector<netreplica::CrossTrafficProfile> out;
  out.reserve(count);
  std::uniform_int_distribution<uint64_t> value(0, max_bin);
  for (size_t i = 0; i < count; ++i) {
    std::vector<uint64_t> series(bins);
    for (auto& b : series) b = value(rng);
    auto p = make_profile(series);
    p.source_trace = "synthetic-" + std::to_string(i);
    p.id = netreplica::profile_content_id(p);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace testutil
