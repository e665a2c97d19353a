#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "netreplica/types.hpp"

namespace netreplica::eval {

// Classic DTW: full-grid dynamic program, |a_i - b_j| local cost, steps
// {down, right, diagonal}, no window constraint, no normalization.
// Throws std::invalid_argument on an empty series.
double dtw(std::span<const double> a, std::span<const double> b);

struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;  // symmetric, zero diagonal
};

struct ConsistencySummary {
  DistanceMatrix matrix;
  double mean = 0.0;
  double stddev = 0.0;  // population, over the n(n-1)/2 off-diagonal pairs
};

// Pairwise DTW over all unordered trace pairs plus the off-diagonal
// mean/std. Requires at least two traces.
ConsistencySummary pairwise_consistency(const std::vector<std::vector<double>>& traces,
                                        const std::vector<std::string>& labels = {});

// Square root of the Jensen-Shannon divergence (log base 2) between the two
// samples' histograms over a shared equal-width grid spanning the pooled
// min-max range. 0 for identical histograms, 1 for disjoint support, and 0
// when the pooled range is degenerate.
double jensen_distance(std::span<const double> sample_a, std::span<const double> sample_b,
                       int bins = 20);

struct AutocorrelationProfile {
  // coefficients[k-1] holds the lag-k Pearson autocorrelations, one entry
  // per usable sequence.
  std::vector<std::vector<double>> coefficients;
  uint64_t skipped = 0;  // zero-variance or too-short sequences
};

// Lag 1..max_lag Pearson autocorrelation per sequence. Sequences shorter
// than max_lag + 2 or with a zero-variance lag window are skipped and
// counted; throws if nothing is usable.
AutocorrelationProfile autocorrelation_profile(const std::vector<std::vector<double>>& sequences,
                                               int max_lag = 7);

struct CoverageReport {
  std::vector<double> reference_mean;
  std::vector<std::vector<double>> reference_covariance;  // after ridge
  std::vector<double> distances;
  double median = 0.0;
  std::map<double, double> frac_above;
};

// Mahalanobis distance of every candidate row from the reference
// distribution (mean + population covariance, ridge*trace/d added to the
// diagonal). Requires more reference rows than columns and matching
// candidate dimensionality.
CoverageReport mahalanobis_coverage(const std::vector<std::vector<double>>& reference,
                                    const std::vector<std::vector<double>>& candidates,
                                    double ridge = 1e-6,
                                    const std::vector<double>& thresholds = {10.0});

}  // namespace netreplica::eval
