#include "netreplica/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "netreplica/kernels.hpp"

namespace netreplica::ctp {

namespace {

size_t bin_index(double t, double start, uint32_t width_ms) {
  const double off_ms = (t - start) * 1000.0;
  return static_cast<size_t>(std::floor(off_ms / width_ms));
}

void check_geometry(const ByteSeries& a, const ByteSeries& b) {
  if (a.bin_width_ms != b.bin_width_ms || a.bins.size() != b.bins.size() ||
      a.start_time_s != b.start_time_s) {
    throw std::invalid_argument("series geometry mismatch");
  }
}

}  // namespace

HostSeries to_timeseries(const HostGroup& group, uint32_t bin_width_ms, double start_time_s,
                         size_t bin_count) {
  if (bin_width_ms == 0) throw std::invalid_argument("bin_width_ms must be > 0");
  HostSeries hs;
  hs.host = group.host;
  hs.up = ByteSeries{bin_width_ms, start_time_s, std::vector<uint64_t>(bin_count, 0)};
  hs.down = ByteSeries{bin_width_ms, start_time_s, std::vector<uint64_t>(bin_count, 0)};
  for (const HostPacket& pkt : group.packets) {
    size_t idx = bin_index(pkt.timestamp, start_time_s, bin_width_ms);
    if (idx >= bin_count) {
      if (pkt.timestamp <= start_time_s + bin_count * bin_width_ms / 1000.0) {
        idx = bin_count - 1;  // boundary rounding
      } else {
        throw std::invalid_argument("packet outside the series time base");
      }
    }
    auto& series = pkt.direction == Direction::Up ? hs.up : hs.down;
    series.bins[idx] += pkt.wire_bytes;

    auto& active = hs.flow_active_bins[pkt.flow_key];
    if (active.empty() || active.back() != static_cast<uint32_t>(idx)) {
      active.push_back(static_cast<uint32_t>(idx));
    }
  }
  for (auto& [key, bins] : hs.flow_active_bins) {
    std::sort(bins.begin(), bins.end());
    bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
  }
  return hs;
}

std::map<Ipv4, HostSeries> build_host_series(const ingest::Decomposition& d,
                                             uint32_t bin_width_ms, double start_time_s,
                                             double end_time_s) {
  if (end_time_s < start_time_s) throw std::invalid_argument("end before start");
  const double span_ms = (end_time_s - start_time_s) * 1000.0;
  const size_t bin_count = static_cast<size_t>(std::floor(span_ms / bin_width_ms)) + 1;

  std::map<Ipv4, HostSeries> out;
  for (const auto& [host, group] : d.groups) {
    out.emplace(host, to_timeseries(group, bin_width_ms, start_time_s, bin_count));
  }
  return out;
}

std::unique_ptr<PrefixNode> build_prefix_tree(const std::map<Ipv4, HostSeries>& hosts) {
  auto root = std::make_unique<PrefixNode>();
  root->prefix = CidrPrefix{0, 0};

  const ByteSeries* reference = nullptr;
  for (const auto& [host, hs] : hosts) {
    check_geometry(hs.up, hs.down);
    if (reference) {
      check_geometry(*reference, hs.up);
    } else {
      reference = &hs.up;
    }
  }
  if (reference) {
    root->up = ByteSeries{reference->bin_width_ms, reference->start_time_s,
                          std::vector<uint64_t>(reference->bins.size(), 0)};
    root->down = root->up;
  }

  const auto accumulate = [](PrefixNode& node, Ipv4 host, const HostSeries& hs) {
    kernels::add_u64(node.up.bins, hs.up.bins);
    kernels::add_u64(node.down.bins, hs.down.bins);
    node.active_hosts.insert(host);
    for (const auto& [key, bins] : hs.flow_active_bins) node.flow_keys.insert(key);
    node.leaf_series.push_back(&hs);
  };

  for (const auto& [host, hs] : hosts) {
    PrefixNode* node = root.get();
    accumulate(*node, host, hs);
    for (const int depth : {8, 16, 24, 32}) {
      const Ipv4 child_addr = apply_prefix(host, depth);
      auto& child = node->children[child_addr];
      if (!child) {
        child = std::make_unique<PrefixNode>();
        child->prefix = CidrPrefix{child_addr, depth};
        child->up = ByteSeries{hs.up.bin_width_ms, hs.up.start_time_s,
                               std::vector<uint64_t>(hs.up.bins.size(), 0)};
        child->down = child->up;
      }
      node = child.get();
      accumulate(*node, host, hs);
    }
  }
  return root;
}

ProfileMetrics compute_metrics(const ByteSeries& series, const WindowContext& ctx) {
  if (series.bins.empty()) throw std::invalid_argument("compute_metrics: empty series");

  ProfileMetrics m;
  m.host_count = ctx.host_count;
  m.flow_count = ctx.flow_count;

  const uint64_t total = kernels::sum_u64(series.bins);
  const uint64_t both = total + ctx.paired_direction_bytes;
  m.asymmetry = both == 0 ? 0.5 : static_cast<double>(total) / static_cast<double>(both);

  recompute_series_metrics(series, m);
  return m;
}

void recompute_series_metrics(const ByteSeries& series, ProfileMetrics& m) {
  const size_t n = series.bins.size();
  if (n == 0) throw std::invalid_argument("empty series");
  const uint32_t w = series.bin_width_ms;

  const uint64_t total = kernels::sum_u64(series.bins);
  if (total == 0) {
    // All-zero series: ratio metrics are 0 by convention.
    m.mean_throughput_bps = 0.0;
    m.max_throughput_bps = 0.0;
    m.pmr = 0.0;
    m.pmr95 = 0.0;
    m.cov = 0.0;
    return;
  }

  const uint64_t peak = kernels::max_u64(series.bins);
  const uint64_t sum_sq = kernels::sum_sq_u64(series.bins);
  const double duration_ms = static_cast<double>(n) * w;

  m.mean_throughput_bps = static_cast<double>(total) * 8000.0 / duration_ms;
  m.max_throughput_bps = static_cast<double>(peak) * 8000.0 / w;
  m.pmr = m.max_throughput_bps / m.mean_throughput_bps;

  // Nearest-rank P95: the ceil(0.95 n)-th order statistic, computed in
  // integer arithmetic.
  const size_t rank = (95 * n + 99) / 100;
  std::vector<uint64_t> sorted(series.bins.begin(), series.bins.end());
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  const uint64_t p95 = sorted[rank - 1];
  m.pmr95 = (static_cast<double>(p95) * 8000.0 / w) / m.mean_throughput_bps;

  const double mean_bin = static_cast<double>(total) / static_cast<double>(n);
  double variance =
      static_cast<double>(sum_sq) / static_cast<double>(n) - mean_bin * mean_bin;
  if (variance < 0.0) variance = 0.0;  // rounding guard
  m.cov = std::sqrt(variance) / mean_bin;
}

namespace {

struct LeafActivity {
  std::vector<uint64_t> combined_cumsum;  // up+down, length n+1
};

using ActivityCache = std::unordered_map<const HostSeries*, LeafActivity>;

const LeafActivity& leaf_activity(ActivityCache& cache, const HostSeries& hs) {
  auto it = cache.find(&hs);
  if (it != cache.end()) return it->second;
  LeafActivity act;
  const size_t n = hs.up.bins.size();
  act.combined_cumsum.assign(n + 1, 0);
  for (size_t i = 0; i < n; ++i) {
    act.combined_cumsum[i + 1] = act.combined_cumsum[i] + hs.up.bins[i] + hs.down.bins[i];
  }
  return cache.emplace(&hs, std::move(act)).first->second;
}

bool flow_active_in(const std::vector<uint32_t>& bins, uint32_t lo, uint32_t hi) {
  const auto it = std::lower_bound(bins.begin(), bins.end(), lo);
  return it != bins.end() && *it < hi;
}

void extract_node_windows(const PrefixNode& node, const WindowConfig& cfg,
                          const std::string& source_trace, ActivityCache& cache,
                          std::vector<CrossTrafficProfile>& out) {
  const size_t n = node.up.bins.size();
  if (n == 0) return;
  const uint32_t w = node.up.bin_width_ms;

  std::vector<uint64_t> cum_up(n + 1, 0), cum_down(n + 1, 0);
  for (size_t i = 0; i < n; ++i) {
    cum_up[i + 1] = cum_up[i] + node.up.bins[i];
    cum_down[i + 1] = cum_down[i] + node.down.bins[i];
  }

  const auto to_bins = [&](double seconds, const char* what) {
    const double ms = seconds * 1000.0;
    const auto bins = static_cast<size_t>(std::llround(ms / w));
    if (bins == 0 || std::llround(ms) != static_cast<long long>(bins) * w) {
      throw std::invalid_argument(std::string(what) + " must be a whole multiple of the bin width");
    }
    return bins;
  };
  const size_t stride_bins = to_bins(cfg.stride_s, "stride");

  for (const double duration_s : cfg.durations_s) {
    const size_t dur_bins = to_bins(duration_s, "duration");
    if (dur_bins > n) continue;
    for (size_t start = 0; start + dur_bins <= n; start += stride_bins) {
      const uint32_t lo = static_cast<uint32_t>(start);
      const uint32_t hi = static_cast<uint32_t>(start + dur_bins);

      WindowContext ctx;
      for (const HostSeries* hs : node.leaf_series) {
        const auto& act = leaf_activity(cache, *hs);
        if (act.combined_cumsum[hi] - act.combined_cumsum[lo] == 0) continue;
        ++ctx.host_count;
        for (const auto& [key, bins] : hs->flow_active_bins) {
          if (flow_active_in(bins, lo, hi)) ++ctx.flow_count;
        }
      }

      const uint64_t up_bytes = cum_up[hi] - cum_up[lo];
      const uint64_t down_bytes = cum_down[hi] - cum_down[lo];

      for (const Direction dir : {Direction::Up, Direction::Down}) {
        const ByteSeries& src = dir == Direction::Up ? node.up : node.down;
        CrossTrafficProfile p;
        p.source_trace = source_trace;
        p.prefix = node.prefix.to_string();
        p.direction = dir;
        p.window_start_s = static_cast<double>(start) * w / 1000.0;
        p.window_duration_s = static_cast<double>(dur_bins) * w / 1000.0;
        p.series.bin_width_ms = w;
        p.series.start_time_s = p.window_start_s;
        p.series.bins.assign(src.bins.begin() + lo, src.bins.begin() + hi);

        ctx.paired_direction_bytes = dir == Direction::Up ? down_bytes : up_bytes;
        p.metrics = compute_metrics(p.series, ctx);
        p.id = profile_content_id(p);
        out.push_back(std::move(p));
      }
    }
  }

  for (const auto& [addr, child] : node.children) {
    extract_node_windows(*child, cfg, source_trace, cache, out);
  }
}

}  // namespace

std::vector<CrossTrafficProfile> extract_windows(const PrefixNode& root, const WindowConfig& cfg,
                                                 const std::string& source_trace) {
  if (cfg.stride_s <= 0) throw std::invalid_argument("stride must be > 0");
  for (const double d : cfg.durations_s) {
    if (d < 1.0 || d > 60.0) throw std::invalid_argument("window durations must lie in [1, 60] s");
  }
  std::vector<CrossTrafficProfile> out;
  ActivityCache cache;
  extract_node_windows(root, cfg, source_trace, cache, out);
  std::sort(out.begin(), out.end(),
            [](const CrossTrafficProfile& a, const CrossTrafficProfile& b) { return a.id < b.id; });
  return out;
}

}  // namespace netreplica::ctp
