#include "netreplica/eval.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netreplica/kernels.hpp"

namespace netreplica::eval {

double dtw(std::span<const double> a, std::span<const double> b) {
  return kernels::dtw_cost(a, b);
}

ConsistencySummary pairwise_consistency(const std::vector<std::vector<double>>& traces,
                                        const std::vector<std::string>& labels) {
  const size_t n = traces.size();
  if (n < 2) throw std::invalid_argument("pairwise_consistency needs at least 2 traces");

  ConsistencySummary out;
  out.matrix.labels.resize(n);
  for (size_t i = 0; i < n; ++i) {
    out.matrix.labels[i] = i < labels.size() ? labels[i] : "trace" + std::to_string(i);
  }
  out.matrix.values.assign(n, std::vector<double>(n, 0.0));

  double sum = 0.0, sum_sq = 0.0;
  const size_t pairs = n * (n - 1) / 2;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double d = dtw(traces[i], traces[j]);
      out.matrix.values[i][j] = d;
      out.matrix.values[j][i] = d;
      sum += d;
      sum_sq += d * d;
    }
  }
  out.mean = sum / static_cast<double>(pairs);
  double var = sum_sq / static_cast<double>(pairs) - out.mean * out.mean;
  if (var < 0.0) var = 0.0;
  out.stddev = std::sqrt(var);
  return out;
}

double jensen_distance(std::span<const double> sample_a, std::span<const double> sample_b,
                       int bins) {
  if (sample_a.empty() || sample_b.empty()) {
    throw std::invalid_argument("jensen_distance: empty sample");
  }
  if (bins < 2) throw std::invalid_argument("jensen_distance: bins must be >= 2");

  double lo = sample_a[0], hi = sample_a[0];
  for (const double v : sample_a) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (const double v : sample_b) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) return 0.0;  // degenerate pooled range

  const double width = (hi - lo) / bins;
  const auto histogram = [&](std::span<const double> xs) {
    std::vector<double> h(static_cast<size_t>(bins), 0.0);
    for (const double v : xs) {
      auto idx = static_cast<size_t>((v - lo) / width);
      if (idx >= h.size()) idx = h.size() - 1;  // v == hi
      h[idx] += 1.0;
    }
    for (double& p : h) p /= static_cast<double>(xs.size());
    return h;
  };

  const auto p = histogram(sample_a);
  const auto q = histogram(sample_b);

  // JSD in bits: H(m) - (H(p) + H(q)) / 2 with m the midpoint distribution.
  const auto entropy_term = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
  double h_m = 0.0, h_p = 0.0, h_q = 0.0;
  for (int i = 0; i < bins; ++i) {
    h_m += entropy_term((p[i] + q[i]) / 2.0);
    h_p += entropy_term(p[i]);
    h_q += entropy_term(q[i]);
  }
  double jsd = h_m - (h_p + h_q) / 2.0;
  jsd = std::clamp(jsd, 0.0, 1.0);
  return std::sqrt(jsd);
}

AutocorrelationProfile autocorrelation_profile(const std::vector<std::vector<double>>& sequences,
                                               int max_lag) {
  if (max_lag < 1) throw std::invalid_argument("max_lag must be >= 1");
  AutocorrelationProfile out;
  out.coefficients.assign(static_cast<size_t>(max_lag), {});

  size_t usable = 0;
  for (const auto& seq : sequences) {
    if (seq.size() < static_cast<size_t>(max_lag) + 2) {
      ++out.skipped;
      continue;
    }
    const double first = seq[0];
    if (std::all_of(seq.begin(), seq.end(), [&](double v) { return v == first; })) {
      ++out.skipped;  // zero-variance sequence
      continue;
    }
    bool used = false;
    for (int lag = 1; lag <= max_lag; ++lag) {
      const size_t n = seq.size() - static_cast<size_t>(lag);
      double mean_x = 0.0, mean_y = 0.0;
      for (size_t i = 0; i < n; ++i) {
        mean_x += seq[i];
        mean_y += seq[i + lag];
      }
      mean_x /= static_cast<double>(n);
      mean_y /= static_cast<double>(n);
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      for (size_t i = 0; i < n; ++i) {
        const double dx = seq[i] - mean_x;
        const double dy = seq[i + lag] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
      }
      if (sxx == 0.0 || syy == 0.0) {
        ++out.skipped;
        continue;
      }
      out.coefficients[static_cast<size_t>(lag) - 1].push_back(sxy / std::sqrt(sxx * syy));
      used = true;
    }
    if (used) ++usable;
  }
  if (usable == 0) throw std::invalid_argument("no sequence long enough for the requested lags");
  return out;
}

CoverageReport mahalanobis_coverage(const std::vector<std::vector<double>>& reference,
                                    const std::vector<std::vector<double>>& candidates,
                                    double ridge, const std::vector<double>& thresholds) {
  const size_t n = reference.size();
  if (n == 0) throw std::invalid_argument("empty reference");
  const size_t d = reference[0].size();
  if (d == 0) throw std::invalid_argument("zero-dimensional reference");
  if (n <= d) throw std::invalid_argument("reference needs more rows than columns");
  for (const auto& row : reference) {
    if (row.size() != d) throw std::invalid_argument("ragged reference matrix");
  }
  for (const auto& row : candidates) {
    if (row.size() != d) throw std::invalid_argument("candidate dimensionality mismatch");
  }

  Eigen::MatrixXd ref(n, d);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) ref(static_cast<long>(i), static_cast<long>(j)) = reference[i][j];
  }

  const Eigen::VectorXd mu = ref.colwise().mean().transpose();
  const Eigen::MatrixXd centered = ref.rowwise() - mu.transpose();
  Eigen::MatrixXd sigma =
      (centered.adjoint() * centered) / static_cast<double>(n);  // population covariance
  if (ridge > 0.0) {
    const double bump = ridge * sigma.trace() / static_cast<double>(d);
    sigma.diagonal().array() += bump;
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("covariance not positive definite; raise the ridge");
  }

  CoverageReport report;
  report.reference_mean.assign(mu.data(), mu.data() + d);
  report.reference_covariance.assign(d, std::vector<double>(d));
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j < d; ++j) {
      report.reference_covariance[i][j] = sigma(static_cast<long>(i), static_cast<long>(j));
    }
  }

  report.distances.reserve(candidates.size());
  for (const auto& row : candidates) {
    Eigen::VectorXd x(d);
    for (size_t j = 0; j < d; ++j) x(static_cast<long>(j)) = row[j];
    const Eigen::VectorXd delta = x - mu;
    const Eigen::VectorXd solved = llt.solve(delta);
    report.distances.push_back(std::sqrt(delta.dot(solved)));
  }

  if (!report.distances.empty()) {
    std::vector<double> sorted = report.distances;
    std::sort(sorted.begin(), sorted.end());
    const size_t m = sorted.size();
    report.median =
        m % 2 == 1 ? sorted[m / 2] : (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0;
    for (const double thr : thresholds) {
      const auto above = std::count_if(sorted.begin(), sorted.end(),
                                       [&](double v) { return v > thr; });
      report.frac_above[thr] = static_cast<double>(above) / static_cast<double>(m);
    }
  } else {
    for (const double thr : thresholds) report.frac_above[thr] = 0.0;
  }
  return report;
}

}  // namespace netreplica::eval
