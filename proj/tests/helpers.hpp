#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "netreplica/types.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("netreplica_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --- synthetic classic pcap -------------------------------------------------

struct PcapPacket {
  double timestamp = 0.0;
  std::string src = "10.0.0.1";
  std::string dst = "1.2.3.4";
  uint16_t sport = 1000;
  uint16_t dport = 80;
  uint8_t proto = 6;
  uint32_t wire_bytes = 1000;
};

// Builds a classic little- or big-endian microsecond pcap with Ethernet/IPv4
// frames. Captured data is a minimal 54-byte header slice; orig_len carries
// wire_bytes.
std::string build_pcap(const std::vector<PcapPacket>& packets, bool big_endian = false);

// --- synthetic packet CSV -----------------------------------------------------

struct CsvPacket {
  double timestamp;
  std::string src;
  std::string dst;
  uint16_t sport = 1000;
  uint16_t dport = 80;
  std::string proto = "TCP";
  uint64_t bytes = 1000;
};

std::string build_packet_csv(const std::vector<CsvPacket>& packets);

// --- profiles -----------------------------------------------------------------

netreplica::CrossTrafficProfile make_profile(const std::vector<uint64_t>& bins,
                                             uint32_t bin_width_ms = 100,
                                             netreplica::Direction dir = netreplica::Direction::Down,
                                             const std::string& prefix = "10.0.0.5/32",
                                             const std::string& source = "synthetic");

std::vector<netreplica::CrossTrafficProfile> random_profiles(std::mt19937_64& rng, size_t count,
                                                             size_t bins, uint64_t max_bin);

}  // namespace testutil
