#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "netreplica/types.hpp"

namespace netreplica::prep {

struct TrimReport {
  std::string profile_id;
  double scale_factor = 1.0;  // min(1, threshold / original peak)
  double original_peak_bps = 0.0;
  double threshold_bps = 0.0;
};

struct SamplingPlan {
  double on_threshold_bps = 3e6;
  uint32_t segment_ms = 100;
  uint32_t toggle_min = 1;
  uint32_t toggle_max = 100;
  uint64_t per_bucket = 50;
  uint64_t seed = 0;
};

// Profiles whose peak throughput stays at or below the threshold, unmodified.
std::vector<CrossTrafficProfile> filter_profiles(const std::vector<CrossTrafficProfile>& profiles,
                                                 double threshold_bps);

// Scales every bin by min(1, threshold/peak) so the peak fits the threshold
// while PMR/CoV are preserved up to integer rounding. Bins round to nearest
// (peak bins round half down); a final one-byte cap enforces the peak bound
// exactly when the byte threshold is fractional. Recomputes the series
// metrics, keeps the heterogeneity ones, and assigns a fresh id.
std::pair<CrossTrafficProfile, TrimReport> trim_profile(const CrossTrafficProfile& p,
                                                        double threshold_bps);

// ON/OFF transition count of fixed-length segments against the plan's
// throughput threshold (strictly greater is ON). The profile's bins are
// resampled by summation when the plan asks for coarser segments; the
// segment width must be a whole multiple of the bin width.
uint64_t toggle_count(const CrossTrafficProfile& p, const SamplingPlan& plan);

struct SampleResult {
  std::vector<CrossTrafficProfile> profiles;  // toggle_count populated
  std::map<uint32_t, uint64_t> bucket_available;
  std::map<uint32_t, uint64_t> bucket_taken;   // short buckets show fewer
};

// Uniformly samples up to per_bucket distinct profiles per toggle value in
// [toggle_min, toggle_max]; profiles outside the range are excluded.
// Deterministic for a fixed seed.
SampleResult stratified_sample(const std::vector<CrossTrafficProfile>& profiles,
                               const SamplingPlan& plan);

}  // namespace netreplica::prep
