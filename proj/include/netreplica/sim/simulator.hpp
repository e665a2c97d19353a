#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "netreplica/sim/aqm.hpp"
#include "netreplica/types.hpp"

namespace netreplica::sim {

// Static attributes of the emulated link. Shaping applies to the downlink
// (data direction); the ACK path is unconstrained. Base latency is the full
// round trip, split half per direction.
struct BottleneckConfig {
  double shaping_rate_bps = 1e7;
  double base_latency_ms = 100.0;
  uint32_t queue_capacity_pkts = 1000;
  AqmPolicy aqm = AqmPolicy::Pfifo;
  uint32_t token_bucket_burst_bytes = 3000;  // 2 x MTU
  uint32_t mtu_bytes = 1500;

  void validate() const;  // throws std::invalid_argument
};

// Closed-loop bulk transfer driving the bottleneck: Reno-style AIMD with
// slow start, halving on loss (at most once per window), and a retransmit
// timer as the fallback detector.
struct AppFlowConfig {
  uint32_t initial_cwnd_pkts = 10;
  uint32_t init_ssthresh_pkts = 64;
  double duration_s = 30.0;
  uint64_t seed = 0;

  void validate() const;
};

struct SimTotals {
  uint64_t app_bytes_sent = 0;
  uint64_t app_bytes_delivered = 0;
  uint64_t app_bytes_dropped = 0;
  uint64_t app_bytes_in_flight = 0;
  uint64_t cross_bytes_sent = 0;
  uint64_t cross_bytes_delivered = 0;
  uint64_t cross_bytes_dropped = 0;
  uint64_t cross_bytes_in_flight = 0;
  uint64_t rtt_samples = 0;
  double min_rtt_ms = 0.0;
};

// Telemetry emitted by one simulation run. rtt_ms bins with no samples hold
// NaN and serialize as null / an empty CSV field.
struct SimTrace {
  uint32_t telemetry_bin_ms = 100;
  std::vector<double> throughput_bps;   // delivered app bytes per bin * 8 / bin
  std::vector<double> rtt_ms;           // per-bin mean of per-packet samples
  std::vector<double> mean_qlen_pkts;   // time-weighted queue length
  std::vector<uint64_t> drops;          // enqueue + AQM drops per bin
  SimTotals totals;
  BottleneckConfig config;
  AppFlowConfig app;
  std::string ctp_id;  // empty when no cross traffic

  nlohmann::ordered_json to_json() const;
  static SimTrace from_json(const nlohmann::json& j);
  std::string to_csv() const;  // time_s,throughput_bps,rtt_ms,qlen_pkts,drops
};

struct Emission {
  Ns offset_ns = 0;  // within one pass of the profile
  uint32_t size_bytes = 0;
};

// Open-loop packet schedule for one pass of a profile: each bin's bytes
// become MTU-sized packets paced uniformly within the bin; the remainder
// rides as a final packet when it is at least 64 B and merges into the
// previous packet otherwise. Total scheduled bytes equal the bin sum
// exactly.
std::vector<Emission> replay_schedule(const CrossTrafficProfile& ctp, uint32_t mtu_bytes);

// Runs the bottleneck with the closed-loop app flow and optional open-loop
// cross traffic (profiles shorter than the run loop seamlessly).
// Deterministic for fixed inputs.
SimTrace simulate(const BottleneckConfig& bcfg, const AppFlowConfig& app,
                  const CrossTrafficProfile* ctp, uint32_t telemetry_bin_ms);

struct BatchItem {
  BottleneckConfig bottleneck;
  AppFlowConfig app;
  std::optional<CrossTrafficProfile> ctp;
  uint32_t telemetry_bin_ms = 100;
};

struct BatchResult {
  std::optional<SimTrace> trace;
  std::string error;  // set when the item failed validation or execution
};

// Runs items with the given parallelism; results are positionally identical
// to a sequential run because each simulation is fully isolated.
std::vector<BatchResult> run_batch(const std::vector<BatchItem>& items, unsigned parallelism);

}  // namespace netreplica::sim
