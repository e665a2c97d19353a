#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "netreplica/hash.hpp"
#include "netreplica/ingest.hpp"

using namespace netreplica;
using testutil::TempDir;

namespace {

ingest::IngestConfig config(std::initializer_list<const char*> prefixes) {
  ingest::IngestConfig cfg;
  for (const char* p : prefixes) cfg.internal_prefixes.push_back(*CidrPrefix::parse(p));
  return cfg;
}

}  // namespace

TEST_CASE("parse_trace reads a synthetic pcap, both endiannesses") {
  TempDir dir;
  const std::vector<testutil::PcapPacket> packets = {
      {0.0, "10.0.0.5", "1.2.3.4", 1234, 443, 6, 1000},
      {0.5, "1.2.3.4", "10.0.0.5", 443, 1234, 6, 1500},
      {1.25, "10.0.0.5", "1.2.3.4", 1234, 443, 17, 200},
  };
  for (const bool be : {false, true}) {
    const std::string path = dir.file(be ? "be.pcap" : "le.pcap");
    testutil::write_file(path, testutil::build_pcap(packets, be));
    const auto records = ingest::parse_trace(path, ingest::TraceFormat::Pcap);
    REQUIRE(records.size() == 3);
    CHECK(records[0].timestamp == doctest::Approx(0.0));
    CHECK(records[1].timestamp == doctest::Approx(0.5));
    CHECK(records[2].timestamp == doctest::Approx(1.25));
    CHECK(records[0].wire_bytes == 1000);
    CHECK(records[1].wire_bytes == 1500);
    CHECK(records[2].wire_bytes == 200);
    CHECK(records[0].src_addr == *parse_ipv4("10.0.0.5"));
    CHECK(records[1].dst_addr == *parse_ipv4("10.0.0.5"));
    CHECK(records[0].protocol == Protocol::Tcp);
    CHECK(records[2].protocol == Protocol::Udp);
    CHECK(records[0].src_port == 1234);
    CHECK(records[0].dst_port == 443);
  }
}

TEST_CASE("parse_trace: empty capture with a valid header is an empty list") {
  TempDir dir;
  const std::string path = dir.file("empty.pcap");
  testutil::write_file(path, testutil::build_pcap({}));
  CHECK(ingest::parse_trace(path, ingest::TraceFormat::Pcap).empty());
}

TEST_CASE("parse_trace: truncated final record reports the truncation offset") {
  TempDir dir;
  const std::string full = testutil::build_pcap({{0.0}, {1.0}});
  // Cut into the last packet's data: the parser must point at the data
  // region of the record whose header promised more bytes.
  const std::string cut = full.substr(0, full.size() - 10);
  const std::string path = dir.file("trunc.pcap");
  testutil::write_file(path, cut);

  // Offset oracle from construction: global header 24, per record 16 + 54.
  const uint64_t second_record_data = 24 + (16 + 54) + 16;
  try {
    ingest::parse_trace(path, ingest::TraceFormat::Pcap);
    FAIL("expected ParseError");
  } catch (const ingest::ParseError& e) {
    CHECK(e.offset() == second_record_data);
    CHECK(std::string(e.what()).find("truncated") != std::string::npos);
  }

  // Cutting inside a record header is also reported, at the header offset.
  const std::string cut_header = full.substr(0, 24 + (16 + 54) + 7);
  testutil::write_file(path, cut_header);
  try {
    ingest::parse_trace(path, ingest::TraceFormat::Pcap);
    FAIL("expected ParseError");
  } catch (const ingest::ParseError& e) {
    CHECK(e.offset() == 24 + 16 + 54);
  }
}

TEST_CASE("parse_trace reads the packet CSV format") {
  TempDir dir;
  const std::string path = dir.file("t.csv");
  testutil::write_file(path, testutil::build_packet_csv({
                                 {0.05, "10.0.0.5", "1.2.3.4", 1000, 80, "TCP", 1000},
                                 {0.12, "1.2.3.4", "10.0.0.5", 80, 1000, "UDP", 500},
                                 {0.5, "10.0.0.5", "9.9.9.9", 0, 0, "OTHER", 64},
                             }));
  const auto records = ingest::parse_trace(path, ingest::TraceFormat::PacketCsv);
  REQUIRE(records.size() == 3);
  CHECK(records[0].wire_bytes == 1000);
  CHECK(records[1].protocol == Protocol::Udp);
  CHECK(records[2].protocol == Protocol::Other);
  CHECK(records[2].src_port == 0);

  testutil::write_file(path, "0.0,10.0.0.5,1.2.3.4,80\n");
  CHECK_THROWS_AS(ingest::parse_trace(path, ingest::TraceFormat::PacketCsv), ingest::ParseError);
}

TEST_CASE("decompose applies the crossing-direction rule") {
  const auto cfg = config({"10.0.0.0/8"});
  std::vector<PacketRecord> records;
  const Ipv4 internal = *parse_ipv4("10.0.0.5");
  const Ipv4 external = *parse_ipv4("1.2.3.4");
  for (int i = 0; i < 4; ++i) {
    PacketRecord r;
    r.timestamp = i * 0.1;
    r.wire_bytes = 100 + i;
    r.protocol = Protocol::Tcp;
    if (i % 2 == 0) {
      r.src_addr = internal;
      r.dst_addr = external;
    } else {
      r.src_addr = external;
      r.dst_addr = internal;
    }
    records.push_back(r);
  }

  const auto d = ingest::decompose(records, cfg);
  REQUIRE(d.groups.size() == 1);
  const auto& group = d.groups.at(internal);
  REQUIRE(group.packets.size() == 4);
  CHECK(group.packets[0].direction == Direction::Up);
  CHECK(group.packets[1].direction == Direction::Down);
  CHECK(group.packets[2].direction == Direction::Up);
  CHECK(group.packets[3].direction == Direction::Down);
  CHECK(d.dropped.packets() == 0);

  // both directions of one flow share a key
  CHECK(group.packets[0].flow_key != 0);
}

TEST_CASE("decompose drops non-crossing packets and counts them") {
  const auto cfg = config({"10.0.0.0/8"});
  PacketRecord both;
  both.src_addr = *parse_ipv4("10.0.0.5");
  both.dst_addr = *parse_ipv4("10.0.0.6");
  both.wire_bytes = 500;
  PacketRecord neither;
  neither.timestamp = 0.1;
  neither.src_addr = *parse_ipv4("1.1.1.1");
  neither.dst_addr = *parse_ipv4("2.2.2.2");
  neither.wire_bytes = 300;

  const auto d = ingest::decompose({both, neither}, cfg);
  CHECK(d.groups.empty());
  CHECK(d.dropped.both_internal == 1);
  CHECK(d.dropped.neither_internal == 1);
  CHECK(d.dropped.bytes == 800);
}

TEST_CASE("decompose partitions packets into one group per internal host") {
  const auto cfg = config({"10.0.0.0/8"});
  std::vector<PacketRecord> records;
  for (int i = 0; i < 6; ++i) {
    PacketRecord r;
    r.timestamp = i * 0.01;
    r.src_addr = *parse_ipv4(i % 2 == 0 ? "10.0.0.5" : "10.0.1.7");
    r.dst_addr = *parse_ipv4("8.8.8.8");
    r.wire_bytes = 100;
    records.push_back(r);
  }
  const auto d = ingest::decompose(records, cfg);
  CHECK(d.groups.size() == 2);
  CHECK(d.groups.at(*parse_ipv4("10.0.0.5")).packets.size() == 3);
  CHECK(d.groups.at(*parse_ipv4("10.0.1.7")).packets.size() == 3);
}

TEST_CASE("decompose conserves bytes and keeps per-packet uniqueness") {
  std::mt19937_64 rng(99);
  const auto cfg = config({"10.0.0.0/8", "192.168.0.0/16"});
  std::vector<PacketRecord> records;
  uint64_t total = 0;
  const char* addrs[] = {"10.0.0.1", "10.0.3.9", "192.168.1.4", "1.2.3.4", "8.8.8.8"};
  double t = 0;
  for (int i = 0; i < 500; ++i) {
    PacketRecord r;
    t += static_cast<double>(rng() % 100) / 1000.0;
    r.timestamp = t;
    r.src_addr = *parse_ipv4(addrs[rng() % 5]);
    r.dst_addr = *parse_ipv4(addrs[rng() % 5]);
    r.src_port = static_cast<uint16_t>(rng() % 4);
    r.dst_port = static_cast<uint16_t>(rng() % 4);
    r.protocol = rng() % 2 == 0 ? Protocol::Tcp : Protocol::Udp;
    r.wire_bytes = rng() % 1500;
    total += r.wire_bytes;
    records.push_back(r);
  }
  const auto d = ingest::decompose(records, cfg);

  uint64_t grouped = 0;
  size_t grouped_packets = 0;
  for (const auto& [host, group] : d.groups) {
    for (const auto& p : group.packets) grouped += p.wire_bytes;
    grouped_packets += group.packets.size();
  }
  CHECK(grouped + d.dropped.bytes == total);
  CHECK(grouped_packets + d.dropped.packets() == records.size());

  // Idempotence: flattening the groups back to records and decomposing again
  // reproduces the same groups.
  std::vector<PacketRecord> flattened;
  for (const auto& [host, group] : d.groups) {
    for (const auto& p : group.packets) {
      PacketRecord r;
      r.timestamp = p.timestamp;
      r.wire_bytes = p.wire_bytes;
      if (p.direction == Direction::Up) {
        r.src_addr = host;
        r.dst_addr = *parse_ipv4("1.2.3.4");
      } else {
        r.src_addr = *parse_ipv4("1.2.3.4");
        r.dst_addr = host;
      }
      flattened.push_back(r);
    }
  }
  std::sort(flattened.begin(), flattened.end(),
            [](const PacketRecord& a, const PacketRecord& b) { return a.timestamp < b.timestamp; });
  const auto again = ingest::decompose(flattened, cfg);
  REQUIRE(again.groups.size() == d.groups.size());
  for (const auto& [host, group] : d.groups) {
    const auto& other = again.groups.at(host);
    REQUIRE(other.packets.size() == group.packets.size());
    uint64_t bytes_a = 0, bytes_b = 0;
    for (const auto& p : group.packets) bytes_a += p.wire_bytes;
    for (const auto& p : other.packets) bytes_b += p.wire_bytes;
    CHECK(bytes_a == bytes_b);
  }
}

TEST_CASE("flow_key is order independent") {
  const Ipv4 a = *parse_ipv4("10.0.0.5");
  const Ipv4 b = *parse_ipv4("1.2.3.4");
  CHECK(flow_key(a, 1234, b, 443, 6) == flow_key(b, 443, a, 1234, 6));
  CHECK(flow_key(a, 1234, b, 443, 6) != flow_key(a, 1235, b, 443, 6));
  CHECK(flow_key(a, 1234, b, 443, 6) != flow_key(a, 1234, b, 443, 17));
}
