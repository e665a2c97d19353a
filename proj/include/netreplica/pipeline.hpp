#pragma once

#include <map>
#include <memory>
#include <set>
#include <vector>

#include "netreplica/ingest.hpp"
#include "netreplica/types.hpp"

namespace netreplica::ctp {

// Per-host series plus the per-flow activity needed for window-level
// heterogeneity counts. flow_active_bins maps a flow key to the sorted bin
// indices where the flow saw at least one packet (either direction).
struct HostSeries {
  Ipv4 host = 0;
  ByteSeries up;
  ByteSeries down;
  std::map<uint64_t, std::vector<uint32_t>> flow_active_bins;
};

// Converts one host's packets into aligned up/down series. Bins cover
// [start_time_s, start_time_s + n*bin_width); a packet at t lands in bin
// floor((t - start) / width). The shared trace start keeps bin boundaries
// identical across hosts.
HostSeries to_timeseries(const HostGroup& group, uint32_t bin_width_ms, double start_time_s,
                         size_t bin_count);

// Series for every host of a decomposition over a common time base.
// bin_count derives from the trace span: ceil((t_last - t_first) / width),
// with a minimum of one bin.
std::map<Ipv4, HostSeries> build_host_series(const ingest::Decomposition& d,
                                             uint32_t bin_width_ms, double start_time_s,
                                             double end_time_s);

// Aggregation levels: /32 hosts up to the root.
inline constexpr int kTreeDepths[] = {32, 24, 16, 8, 0};

struct PrefixNode {
  CidrPrefix prefix;
  ByteSeries up;
  ByteSeries down;
  std::set<Ipv4> active_hosts;
  std::set<uint64_t> flow_keys;
  std::map<uint32_t, std::unique_ptr<PrefixNode>> children;  // key: child prefix address

  // Leaves under this node, for window-level host/flow activity queries.
  std::vector<const HostSeries*> leaf_series;
};

// Builds the /32 -> /24 -> /16 -> /8 -> root tree; every interior node's
// series is the elementwise sum of its children. Throws std::invalid_argument
// on mismatched series geometry.
std::unique_ptr<PrefixNode> build_prefix_tree(const std::map<Ipv4, HostSeries>& hosts);

// Everything compute_metrics needs to know about one window beyond the
// windowed series itself.
struct WindowContext {
  uint64_t host_count = 0;
  uint64_t flow_count = 0;
  uint64_t paired_direction_bytes = 0;
};

// Metrics over a windowed series. The series-derived metrics (mean, max,
// pmr, pmr95, cov) are pure functions of the bins and reproduce bit-for-bit
// on recompute; heterogeneity counts and asymmetry come from the context.
ProfileMetrics compute_metrics(const ByteSeries& series, const WindowContext& ctx);

// Recomputes only the series-derived metrics of a stored profile.
void recompute_series_metrics(const ByteSeries& series, ProfileMetrics& m);

struct WindowConfig {
  std::vector<double> durations_s;  // each in [1, 60]
  double stride_s = 10.0;
};

// Overlapping sliding windows over every node and direction of the tree.
// Windows start at 0, stride, 2*stride, ... while start + duration fits the
// series; durations longer than the series produce no windows. Output is
// sorted by profile id. Durations and stride must be whole multiples of the
// bin width.
std::vector<CrossTrafficProfile> extract_windows(const PrefixNode& root, const WindowConfig& cfg,
                                                 const std::string& source_trace);

}  // namespace netreplica::ctp
