#include "netreplica/profile_io.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "netreplica/ingest.hpp"

namespace netreplica {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json profile_to_json(const CrossTrafficProfile& p) {
  ordered_json j;
  j["id"] = p.id;
  j["source_trace"] = p.source_trace;
  j["prefix"] = p.prefix;
  j["direction"] = std::string(to_string(p.direction));
  j["window_start_s"] = p.window_start_s;
  j["window_duration_s"] = p.window_duration_s;
  j["bin_width_ms"] = p.series.bin_width_ms;
  j["bins"] = p.series.bins;
  ordered_json m;
  m["mean_throughput_bps"] = p.metrics.mean_throughput_bps;
  m["max_throughput_bps"] = p.metrics.max_throughput_bps;
  m["pmr"] = p.metrics.pmr;
  m["pmr95"] = p.metrics.pmr95;
  m["cov"] = p.metrics.cov;
  m["host_count"] = p.metrics.host_count;
  m["flow_count"] = p.metrics.flow_count;
  m["asymmetry"] = p.metrics.asymmetry;
  m["toggle_count"] = p.metrics.toggle_count;
  j["metrics"] = m;
  return j;
}

CrossTrafficProfile profile_from_json(const json& j) {
  CrossTrafficProfile p;
  p.id = j.at("id").get<std::string>();
  p.source_trace = j.at("source_trace").get<std::string>();
  p.prefix = j.at("prefix").get<std::string>();
  const auto dir = j.at("direction").get<std::string>();
  if (dir == "UP") {
    p.direction = Direction::Up;
  } else if (dir == "DOWN") {
    p.direction = Direction::Down;
  } else {
    throw std::invalid_argument("bad direction: " + dir);
  }
  p.window_start_s = j.at("window_start_s").get<double>();
  p.window_duration_s = j.at("window_duration_s").get<double>();
  p.series.bin_width_ms = j.at("bin_width_ms").get<uint32_t>();
  p.series.start_time_s = p.window_start_s;
  p.series.bins = j.at("bins").get<std::vector<uint64_t>>();
  const auto& m = j.at("metrics");
  p.metrics.mean_throughput_bps = m.at("mean_throughput_bps").get<double>();
  p.metrics.max_throughput_bps = m.at("max_throughput_bps").get<double>();
  p.metrics.pmr = m.at("pmr").get<double>();
  p.metrics.pmr95 = m.at("pmr95").get<double>();
  p.metrics.cov = m.at("cov").get<double>();
  p.metrics.host_count = m.at("host_count").get<uint64_t>();
  p.metrics.flow_count = m.at("flow_count").get<uint64_t>();
  p.metrics.asymmetry = m.at("asymmetry").get<double>();
  p.metrics.toggle_count = m.value("toggle_count", uint64_t{0});
  return p;
}

std::string profile_to_jsonl_line(const CrossTrafficProfile& p) {
  return profile_to_json(p).dump();
}

CrossTrafficProfile profile_from_jsonl_line(const std::string& line) {
  return profile_from_json(json::parse(line));
}

void write_profiles_jsonl(const std::string& path,
                          const std::vector<CrossTrafficProfile>& profiles) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& p : profiles) out << profile_to_jsonl_line(p) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<CrossTrafficProfile> read_profiles_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<CrossTrafficProfile> out;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(profile_from_jsonl_line(line));
    } catch (const std::exception& e) {
      throw ingest::ParseError(
          "bad profile at line " + std::to_string(lineno) + ": " + e.what(), lineno);
    }
  }
  return out;
}

}  // namespace netreplica
