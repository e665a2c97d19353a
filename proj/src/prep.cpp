#include "netreplica/prep.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "netreplica/kernels.hpp"
#include "netreplica/pipeline.hpp"

namespace netreplica::prep {

namespace {

// splitmix64; decorrelates per-bucket RNG streams from one plan seed.
uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<CrossTrafficProfile> filter_profiles(const std::vector<CrossTrafficProfile>& profiles,
                                                 double threshold_bps) {
  if (threshold_bps <= 0) throw std::invalid_argument("threshold_bps must be > 0");
  std::vector<CrossTrafficProfile> out;
  for (const auto& p : profiles) {
    if (p.metrics.max_throughput_bps <= threshold_bps) out.push_back(p);
  }
  return out;
}

std::pair<CrossTrafficProfile, TrimReport> trim_profile(const CrossTrafficProfile& p,
                                                        double threshold_bps) {
  if (threshold_bps <= 0) throw std::invalid_argument("threshold_bps must be > 0");

  TrimReport report;
  report.profile_id = p.id;
  report.threshold_bps = threshold_bps;

  const uint64_t peak_bin = kernels::max_u64(p.series.bins);
  const double peak_bps = static_cast<double>(peak_bin) * 8000.0 / p.series.bin_width_ms;
  report.original_peak_bps = peak_bps;
  if (peak_bin == 0 || peak_bps <= threshold_bps) {
    report.scale_factor = 1.0;
    return {p, report};
  }

  const double scale = threshold_bps / peak_bps;
  report.scale_factor = scale;

  // Largest integer bin that keeps the scaled peak at or below the
  // threshold: thr_bytes = threshold * bin_width / 8000.
  const double thr_bytes = threshold_bps * p.series.bin_width_ms / 8000.0;
  const uint64_t bin_cap = static_cast<uint64_t>(std::floor(thr_bytes));

  CrossTrafficProfile trimmed = p;
  for (uint64_t& bin : trimmed.series.bins) {
    const double scaled = static_cast<double>(bin) * scale;
    uint64_t rounded;
    if (bin == peak_bin) {
      // round half down, so an exact .5 tie stays under the threshold
      rounded = static_cast<uint64_t>(std::ceil(scaled - 0.5));
    } else {
      rounded = static_cast<uint64_t>(std::llround(scaled));
    }
    bin = std::min(rounded, bin_cap);
  }

  ctp::recompute_series_metrics(trimmed.series, trimmed.metrics);
  trimmed.metrics.toggle_count = 0;
  trimmed.id = profile_content_id(trimmed);
  return {trimmed, report};
}

uint64_t toggle_count(const CrossTrafficProfile& p, const SamplingPlan& plan) {
  const uint32_t w = p.series.bin_width_ms;
  if (plan.segment_ms < w || plan.segment_ms % w != 0) {
    throw std::invalid_argument("segment width incompatible with profile bin width");
  }
  const size_t group = plan.segment_ms / w;

  const std::vector<uint64_t>* segments = &p.series.bins;
  std::vector<uint64_t> folded;
  if (group > 1) {
    folded.reserve(p.series.bins.size() / group + 1);
    for (size_t i = 0; i < p.series.bins.size(); i += group) {
      const size_t hi = std::min(i + group, p.series.bins.size());
      uint64_t total = 0;
      for (size_t k = i; k < hi; ++k) total += p.series.bins[k];
      folded.push_back(total);
    }
    segments = &folded;
  }
  if (segments->size() < 2) return 0;

  // ON means throughput strictly above threshold: bytes > thr*seg/8000.
  // For a full segment the integer comparison bytes > floor(x) is exact.
  const double thr_bytes = plan.on_threshold_bps * plan.segment_ms / 8000.0;
  const uint64_t thr = thr_bytes < 0 ? 0 : static_cast<uint64_t>(std::floor(thr_bytes));

  const size_t n = segments->size();
  const bool has_partial_tail = p.series.bins.size() % group != 0;
  if (!has_partial_tail) {
    return kernels::toggle_count_u64(*segments, thr);
  }

  // Tail segment is shorter; its byte threshold scales with its duration.
  const uint64_t head_toggles =
      kernels::toggle_count_u64(std::span(segments->data(), n - 1), thr);
  const size_t tail_bins = p.series.bins.size() % group;
  const double tail_ms = static_cast<double>(tail_bins) * w;
  const uint64_t tail_thr =
      static_cast<uint64_t>(std::floor(plan.on_threshold_bps * tail_ms / 8000.0));
  const bool prev_on = (*segments)[n - 2] > thr;
  const bool tail_on = (*segments)[n - 1] > tail_thr;
  return head_toggles + (prev_on != tail_on);
}

SampleResult stratified_sample(const std::vector<CrossTrafficProfile>& profiles,
                               const SamplingPlan& plan) {
  if (plan.per_bucket == 0) throw std::invalid_argument("per_bucket must be > 0");
  if (plan.toggle_min > plan.toggle_max) throw std::invalid_argument("empty toggle range");

  std::map<uint32_t, std::vector<const CrossTrafficProfile*>> buckets;
  std::map<const CrossTrafficProfile*, uint64_t> toggles;
  for (const auto& p : profiles) {
    const uint64_t t = toggle_count(p, plan);
    if (t < plan.toggle_min || t > plan.toggle_max) continue;
    buckets[static_cast<uint32_t>(t)].push_back(&p);
    toggles[&p] = t;
  }

  SampleResult result;
  for (auto& [value, members] : buckets) {
    // Canonical order before shuffling keeps selection independent of the
    // caller's input order.
    std::sort(members.begin(), members.end(),
              [](const CrossTrafficProfile* a, const CrossTrafficProfile* b) {
                return a->id < b->id;
              });
    members.erase(std::unique(members.begin(), members.end(),
                              [](const CrossTrafficProfile* a, const CrossTrafficProfile* b) {
                                return a->id == b->id;
                              }),
                  members.end());

    result.bucket_available[value] = members.size();
    const size_t take = std::min<size_t>(plan.per_bucket, members.size());

    std::mt19937_64 rng(mix(plan.seed ^ mix(value)));
    for (size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<size_t> pick(i, members.size() - 1);
      std::swap(members[i], members[pick(rng)]);
    }

    std::vector<const CrossTrafficProfile*> chosen(members.begin(),
                                                   members.begin() + static_cast<long>(take));
    std::sort(chosen.begin(), chosen.end(),
              [](const CrossTrafficProfile* a, const CrossTrafficProfile* b) {
                return a->id < b->id;
              });
    for (const auto* p : chosen) {
      CrossTrafficProfile out = *p;
      out.metrics.toggle_count = toggles.at(p);
      result.profiles.push_back(std::move(out));
    }
    result.bucket_taken[value] = take;
  }
  return result;
}

}  // namespace netreplica::prep
